#include "divent/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "divent/errors.hpp"
#include "divent/stats.hpp"

namespace divent {

namespace {

constexpr std::uint64_t kMaxSymbols = 6;
constexpr std::uint64_t kMaxSamples = 30;
constexpr double kMergeTol = 1e-12;

void validate_probs(const std::vector<double>& probs) {
    if (probs.empty())
        throw std::invalid_argument("probability vector must be nonempty");
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0) || p > 1.0)
            throw std::invalid_argument("probabilities must lie in [0, 1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("probabilities must sum to 1");
}

void guard_size(std::size_t k, std::uint64_t n) {
    if (k > kMaxSymbols || n > kMaxSamples)
        throw infeasible_error("exact enumeration limited to k <= 6 and n <= 30");
    if (n < 1) throw std::invalid_argument("sample size must be >= 1");
}

// Walks every composition of n over the positive-probability symbols and
// hands (counts, multinomial log-weight) to the sink.
void for_each_composition(const std::vector<double>& probs, std::uint64_t n,
                          const std::function<void(const SampleCounts&, double)>& sink) {
    std::vector<std::pair<std::uint64_t, double>> support; // (symbol, ln p)
    for (std::size_t i = 0; i < probs.size(); ++i)
        if (probs[i] > 0.0) support.emplace_back(i + 1, std::log(probs[i]));

    const double log_n_fact = std::lgamma(static_cast<double>(n) + 1.0);
    std::vector<std::uint64_t> y(support.size(), 0);
    SampleCounts counts;

    const std::function<void(std::size_t, std::uint64_t, double)> walk =
        [&](std::size_t idx, std::uint64_t left, double log_w) {
            if (idx + 1 == support.size()) {
                y[idx] = left;
                const double yd = static_cast<double>(left);
                const double lw = log_w + yd * support[idx].second
                                  - std::lgamma(yd + 1.0);
                counts.counts.clear();
                counts.n = n;
                for (std::size_t j = 0; j < support.size(); ++j)
                    if (y[j] > 0) counts.counts.emplace_back(support[j].first, y[j]);
                sink(counts, log_n_fact + lw);
                return;
            }
            for (std::uint64_t c = 0; c <= left; ++c) {
                y[idx] = c;
                const double yd = static_cast<double>(c);
                walk(idx + 1, left - c,
                     log_w + yd * support[idx].second - std::lgamma(yd + 1.0));
            }
        };
    walk(0, n, 0.0);
}

double direct_truth(const std::vector<double>& probs, EstimatorKind kind,
                    const IndexSpec& index) {
    double sum = 0.0;
    const bool shannon = kind != EstimatorKind::Plugin || !index.is_power();
    for (double p : probs) {
        if (p <= 0.0) continue;
        sum += shannon ? -p * std::log(p) : index.g(p);
    }
    return sum;
}

} // namespace

double AtomicLaw::total_probability() const {
    double sum = 0.0, comp = 0.0;
    for (const auto& [v, p] : atoms) {
        (void)v;
        const double y = p - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

double AtomicLaw::mean() const {
    double sum = 0.0;
    for (const auto& [v, p] : atoms) sum += v * p;
    return sum;
}

double AtomicLaw::variance() const {
    const double m = mean();
    double sum = 0.0;
    for (const auto& [v, p] : atoms) sum += p * (v - m) * (v - m);
    return sum;
}

double AtomicLaw::sd() const { return std::sqrt(variance()); }

AtomicLaw exact_statistic_law(const std::vector<double>& probs, std::uint64_t n,
                              const std::function<double(const SampleCounts&)>& stat) {
    validate_probs(probs);
    guard_size(probs.size(), n);

    std::vector<std::pair<double, double>> raw;
    for_each_composition(probs, n, [&](const SampleCounts& counts, double log_w) {
        raw.emplace_back(stat(counts), std::exp(log_w));
    });
    std::sort(raw.begin(), raw.end());

    AtomicLaw law;
    for (const auto& [v, p] : raw) {
        if (!law.atoms.empty() && v - law.atoms.back().first <= kMergeTol)
            law.atoms.back().second += p;
        else
            law.atoms.emplace_back(v, p);
    }
    return law;
}

AtomicLaw exact_estimator_law(const std::vector<double>& probs, std::uint64_t n,
                              EstimatorKind kind, const IndexSpec& index) {
    return exact_statistic_law(probs, n, [&](const SampleCounts& counts) {
        return estimator_value(counts, kind, index);
    });
}

double exact_mean(const std::vector<double>& probs, std::uint64_t n,
                  EstimatorKind kind, const IndexSpec& index) {
    validate_probs(probs);
    guard_size(probs.size(), n);
    double sum = 0.0, comp = 0.0;
    for_each_composition(probs, n, [&](const SampleCounts& counts, double log_w) {
        const double y = std::exp(log_w) * estimator_value(counts, kind, index) - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    });
    return sum;
}

double exact_kolmogorov(const AtomicLaw& law, double center, double scale) {
    if (!(scale > 0.0))
        throw std::invalid_argument("standardization scale must be positive");
    double dist = 0.0;
    double cdf = 0.0, comp = 0.0;
    for (const auto& [v, p] : law.atoms) {
        const double phi = normal_cdf((v - center) / scale);
        dist = std::max(dist, std::abs(cdf - phi));
        const double y = p - comp;
        const double t = cdf + y;
        comp = (t - cdf) - y;
        cdf = t;
        dist = std::max(dist, std::abs(cdf - phi));
    }
    return dist;
}

MomentBoundCheck verify_moment_bound(double p, std::uint64_t n, double beta) {
    if (!(p > 0.0) || !(p < 1.0))
        throw std::invalid_argument("p must lie in (0, 1)");
    if (!(beta > 0.0) || !(beta <= 1.0))
        throw std::invalid_argument("beta must lie in (0, 1]");
    if (n < 1) throw std::invalid_argument("sample size must be >= 1");

    const double nd = static_cast<double>(n);
    const double log_n_fact = std::lgamma(nd + 1.0);
    const double lp = std::log(p), lq = std::log1p(-p);
    double lhs = 0.0, comp = 0.0;
    for (std::uint64_t j = 0; j <= n; ++j) {
        const double jd = static_cast<double>(j);
        const double lw = log_n_fact - std::lgamma(jd + 1.0) - std::lgamma(nd - jd + 1.0)
                          + jd * lp + (nd - jd) * lq;
        const double term =
            std::exp(lw) * std::pow(std::abs(jd / nd - p), beta + 1.0);
        const double y = term - comp;
        const double t = lhs + y;
        comp = (t - lhs) - y;
        lhs = t;
    }
    const double rhs = 4.0 * p * std::pow(nd, -beta);
    return {lhs, rhs, lhs <= rhs};
}

double exact_bias(const std::vector<double>& probs, std::uint64_t n,
                  EstimatorKind kind, const IndexSpec& index) {
    return exact_mean(probs, n, kind, index) - direct_truth(probs, kind, index);
}

JackknifeIdentity jackknife_bias_identity(const std::vector<double>& probs,
                                          std::uint64_t n) {
    validate_probs(probs);
    guard_size(probs.size(), n);
    if (n < 2) throw std::invalid_argument("jackknife identity requires n >= 2");

    double lhs = 0.0, comp = 0.0;
    for_each_composition(probs, n, [&](const SampleCounts& counts, double log_w) {
        const double y = std::exp(log_w) * jackknife_bias(counts) - comp;
        const double t = lhs + y;
        comp = (t - lhs) - y;
        lhs = t;
    });

    const IndexSpec sh = IndexSpec::shannon();
    const double b_n = exact_bias(probs, n, EstimatorKind::Plugin, sh);
    const double b_nm1 = exact_bias(probs, n - 1, EstimatorKind::Plugin, sh);
    return {lhs, (static_cast<double>(n) - 1.0) * (b_n - b_nm1)};
}

} // namespace divent
