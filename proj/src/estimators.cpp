#include "divent/estimators.hpp"

#include <cmath>
#include <stdexcept>

#include "divent/stats.hpp"

namespace divent {

namespace {

void require_nonempty(const SampleCounts& counts) {
    if (counts.n < 1 || counts.counts.empty())
        throw std::invalid_argument("estimator requires n >= 1");
}

double plugin_value(const SampleCounts& counts, const IndexSpec& index) {
    const double n = static_cast<double>(counts.n);
    double sum = 0.0;
    for (const auto& [sym, y] : counts.counts) {
        (void)sym;
        sum += index.g(static_cast<double>(y) / n);
    }
    return sum;
}

double plugin_sigma_sq_hat(const SampleCounts& counts, const IndexSpec& index) {
    const double n = static_cast<double>(counts.n);
    double mean = 0.0, m2 = 0.0;
    for (const auto& [sym, y] : counts.counts) {
        (void)sym;
        const double p = static_cast<double>(y) / n;
        const double d = index.is_power() ? index.g_prime(p) : std::log(p);
        mean += p * d;
        m2 += p * d * d;
    }
    const double var = m2 - mean * mean;
    return var > 0.0 ? var : 0.0;
}

// H^(del one of symbol i) = ln(n-1) - S_i/(n-1) with S = sum y ln y and
// S_i = S - y_i ln y_i + (y_i - 1) ln(y_i - 1); each deletion value depends
// only on the deleted symbol, so the leave-one-out average costs O(#distinct).
double jackknife_bias_term(const SampleCounts& counts, double h_plugin) {
    const double n = static_cast<double>(counts.n);
    if (counts.distinct() == 1) return 0.0;
    double s = 0.0;
    for (const auto& [sym, y] : counts.counts) {
        (void)sym;
        const double yd = static_cast<double>(y);
        s += yd * std::log(yd);
    }
    const double log_nm1 = std::log(n - 1.0);
    double avg_sum = 0.0;
    for (const auto& [sym, y] : counts.counts) {
        (void)sym;
        const double yd = static_cast<double>(y);
        double si = s - yd * std::log(yd);
        if (y > 1) si += (yd - 1.0) * std::log(yd - 1.0);
        avg_sum += yd * (log_nm1 - si / (n - 1.0));
    }
    return (n - 1.0) * (h_plugin - avg_sum / n);
}

Estimate finish(std::string method, double value, double sigma_sq_hat,
                std::uint64_t n, double level) {
    Estimate est;
    est.method = std::move(method);
    est.value = value;
    est.sigma_hat = std::sqrt(sigma_sq_hat);
    est.std_error = est.sigma_hat / std::sqrt(static_cast<double>(n));
    est.degenerate = est.sigma_hat == 0.0;
    return confidence_interval(est, level);
}

} // namespace

EstimatorKind parse_estimator(const std::string& name) {
    if (name == "plugin") return EstimatorKind::Plugin;
    if (name == "mm" || name == "miller-madow") return EstimatorKind::MillerMadow;
    if (name == "jk" || name == "jackknife") return EstimatorKind::Jackknife;
    throw std::invalid_argument("unknown estimator: " + name);
}

const char* estimator_name(EstimatorKind kind) {
    switch (kind) {
    case EstimatorKind::Plugin: return "plugin";
    case EstimatorKind::MillerMadow: return "mm";
    default: return "jk";
    }
}

Estimate plugin_index(const SampleCounts& counts, const IndexSpec& index, double level) {
    require_nonempty(counts);
    if (!index.is_power())
        throw std::invalid_argument("plugin_index requires a power index");
    return finish("plugin-power", plugin_value(counts, index),
                  plugin_sigma_sq_hat(counts, index), counts.n, level);
}

Estimate shannon_plugin(const SampleCounts& counts, double level) {
    require_nonempty(counts);
    const IndexSpec ix = IndexSpec::shannon();
    return finish("plugin-shannon", plugin_value(counts, ix),
                  plugin_sigma_sq_hat(counts, ix), counts.n, level);
}

Estimate miller_madow(const SampleCounts& counts, double level) {
    Estimate est = shannon_plugin(counts, level);
    est.method = "miller-madow";
    est.value += (static_cast<double>(counts.distinct()) - 1.0)
                 / (2.0 * static_cast<double>(counts.n));
    return confidence_interval(est, level);
}

JackknifeResult jackknife(const SampleCounts& counts, double level) {
    require_nonempty(counts);
    if (counts.n < 2)
        throw std::invalid_argument("jackknife requires n >= 2");
    const IndexSpec ix = IndexSpec::shannon();
    const double h = plugin_value(counts, ix);
    const double bias = jackknife_bias_term(counts, h);
    Estimate est = finish("jackknife", h + bias,
                          plugin_sigma_sq_hat(counts, ix), counts.n, level);
    return {est, bias};
}

Estimate confidence_interval(Estimate est, double level) {
    if (!(level > 0.0) || !(level < 1.0))
        throw std::invalid_argument("confidence level must lie in (0, 1)");
    const double z = normal_quantile(0.5 * (1.0 + level));
    est.level = level;
    est.ci_low = est.value - z * est.std_error;
    est.ci_high = est.value + z * est.std_error;
    return est;
}

Estimate estimate(const SampleCounts& counts, EstimatorKind kind,
                  const IndexSpec& index, double level) {
    switch (kind) {
    case EstimatorKind::Plugin:
        return index.is_power() ? plugin_index(counts, index, level)
                                : shannon_plugin(counts, level);
    case EstimatorKind::MillerMadow:
        if (index.is_power())
            throw std::invalid_argument("miller-madow applies to Shannon entropy only");
        return miller_madow(counts, level);
    default:
        if (index.is_power())
            throw std::invalid_argument("jackknife applies to Shannon entropy only");
        return jackknife(counts, level).estimate;
    }
}

double estimator_value(const SampleCounts& counts, EstimatorKind kind,
                       const IndexSpec& index) {
    require_nonempty(counts);
    switch (kind) {
    case EstimatorKind::Plugin:
        return plugin_value(counts, index);
    case EstimatorKind::MillerMadow:
        if (index.is_power())
            throw std::invalid_argument("miller-madow applies to Shannon entropy only");
        return plugin_value(counts, index)
               + (static_cast<double>(counts.distinct()) - 1.0)
                     / (2.0 * static_cast<double>(counts.n));
    default: {
        if (index.is_power())
            throw std::invalid_argument("jackknife applies to Shannon entropy only");
        if (counts.n < 2)
            throw std::invalid_argument("jackknife requires n >= 2");
        const double h = plugin_value(counts, index);
        return h + jackknife_bias_term(counts, h);
    }
    }
}

double plugin_sigma_hat(const SampleCounts& counts, const IndexSpec& index) {
    require_nonempty(counts);
    return std::sqrt(plugin_sigma_sq_hat(counts, index));
}

double jackknife_bias(const SampleCounts& counts) {
    require_nonempty(counts);
    if (counts.n < 2)
        throw std::invalid_argument("jackknife requires n >= 2");
    return jackknife_bias_term(counts, plugin_value(counts, IndexSpec::shannon()));
}

} // namespace divent
