#include "divent/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "divent/errors.hpp"
#include "divent/indices.hpp"

namespace divent {

namespace {

double kahan_total(const std::vector<double>& xs) {
    double sum = 0.0, comp = 0.0;
    for (double x : xs) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

} // namespace

void validate(const ExperimentConfig& config) {
    if (config.replicates < 100)
        throw std::invalid_argument("experiment requires at least 100 replicates");
    if (config.n_grid.empty())
        throw std::invalid_argument("n grid must be nonempty");
    const std::uint64_t min_n =
        config.estimator == EstimatorKind::Jackknife ? 2 : 1;
    for (std::size_t i = 0; i < config.n_grid.size(); ++i) {
        if (config.n_grid[i] < min_n)
            throw std::invalid_argument("grid sample size too small for estimator");
        if (i > 0 && config.n_grid[i] <= config.n_grid[i - 1])
            throw std::invalid_argument("n grid must be strictly increasing");
    }
    if (config.estimator != EstimatorKind::Plugin && config.index.is_power())
        throw std::invalid_argument(
            "bias-corrected estimators apply to Shannon entropy only");
}

RateReport run_experiment(const ExperimentConfig& config, unsigned workers) {
    validate(config);
    if (workers < 1) workers = 1;

    const std::uint64_t m = config.replicates;
    RateReport report;
    report.points.reserve(config.n_grid.size());

    for (const std::uint64_t n : config.n_grid) {
        const Distribution dist =
            config.dist.depends_on_n() ? config.dist.with_sample_size(n) : config.dist;

        const auto truth = index_value(dist, config.index);
        if (!truth)
            throw infeasible_error("population value is not certifiably finite");
        const Variance asym = index_sigma_sq(dist, config.index);
        if (asym.degenerate || !(asym.value > 0.0))
            throw infeasible_error(
                "asymptotic variance is zero: standardized statistic undefined");
        const double sigma = std::sqrt(asym.value);
        const double root_n = std::sqrt(static_cast<double>(n));

        std::vector<double> stats(m);
        const auto run_block = [&](std::uint64_t lo, std::uint64_t hi) {
            for (std::uint64_t rep = lo; rep < hi; ++rep) {
                const SampleCounts counts =
                    dist.sample_counts(n, derive_seed(config.master_seed, n, rep));
                const double est =
                    estimator_value(counts, config.estimator, config.index);
                const double scale =
                    config.estimated_sigma ? plugin_sigma_hat(counts, config.index)
                                           : sigma;
                const double centered = est - *truth;
                double t;
                if (scale > 0.0)
                    t = root_n * centered / scale;
                else
                    t = centered == 0.0
                            ? 0.0
                            : std::copysign(
                                  std::numeric_limits<double>::infinity(), centered);
                stats[rep] = t;
            }
        };

        if (workers == 1 || m < 2 * workers) {
            run_block(0, m);
        } else {
            std::vector<std::thread> pool;
            std::exception_ptr failure;
            std::mutex failure_mutex;
            for (unsigned w = 0; w < workers; ++w) {
                const std::uint64_t lo = m * w / workers;
                const std::uint64_t hi = m * (w + 1) / workers;
                pool.emplace_back([&, lo, hi] {
                    try {
                        run_block(lo, hi);
                    } catch (...) {
                        const std::scoped_lock lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                });
            }
            for (auto& th : pool) th.join();
            if (failure) std::rethrow_exception(failure);
        }

        std::sort(stats.begin(), stats.end());
        GridPoint point;
        point.n = n;
        point.truth = *truth;
        point.sigma = sigma;
        point.kolmogorov = kolmogorov_distance(stats);
        point.dkw_band = dkw_radius(m);
        point.mean = kahan_total(stats) / static_cast<double>(m);
        double ss = 0.0, comp = 0.0;
        for (double t : stats) {
            const double d = t - point.mean;
            const double y = d * d - comp;
            const double tt = ss + y;
            comp = (tt - ss) - y;
            ss = tt;
        }
        point.variance = m > 1 ? ss / static_cast<double>(m - 1) : 0.0;
        report.points.push_back(point);
    }

    report.noise_dominated = false;
    for (const auto& point : report.points)
        if (point.kolmogorov <= 3.0 * point.dkw_band) report.noise_dominated = true;

    if (!report.noise_dominated && report.points.size() >= 3) {
        std::vector<std::pair<std::uint64_t, double>> pts;
        pts.reserve(report.points.size());
        for (const auto& point : report.points)
            pts.emplace_back(point.n, point.kolmogorov);
        report.fit = rate_fit(pts);
    }

    if (config.index.is_power()) {
        if (const auto gamma = config.index.rate_gamma())
            report.theoretical_exponents.emplace_back("smoothness-rate",
                                                      -0.5 * *gamma);
    } else {
        if (config.delta)
            report.theoretical_exponents.emplace_back("truncation-rate",
                                                      -0.5 * *config.delta);
        if (config.estimator == EstimatorKind::Jackknife && config.epsilon)
            report.theoretical_exponents.emplace_back("light-tail-rate",
                                                      0.25 - 0.5 * *config.epsilon);
    }
    return report;
}

double kolmogorov_distance(std::vector<double> samples) {
    if (samples.empty())
        throw std::invalid_argument("kolmogorov_distance requires samples");
    std::sort(samples.begin(), samples.end());
    const double m = static_cast<double>(samples.size());
    double dist = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double phi = normal_cdf(samples[i]);
        dist = std::max(dist, (static_cast<double>(i) + 1.0) / m - phi);
        dist = std::max(dist, phi - static_cast<double>(i) / m);
    }
    return dist;
}

LineFit rate_fit(const std::vector<std::pair<std::uint64_t, double>>& points) {
    if (points.size() < 3)
        throw std::invalid_argument("rate fit requires at least 3 points");
    std::vector<double> x, y;
    x.reserve(points.size());
    y.reserve(points.size());
    for (const auto& [n, d] : points) {
        if (!(d > 0.0))
            throw std::invalid_argument("rate fit requires positive distances");
        x.push_back(std::log(static_cast<double>(n)));
        y.push_back(std::log(d));
    }
    return ols_fit(x, y);
}

} // namespace divent
