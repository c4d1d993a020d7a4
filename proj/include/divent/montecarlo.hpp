#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "divent/distribution.hpp"
#include "divent/estimators.hpp"
#include "divent/stats.hpp"

namespace divent {

// Replicated estimation experiment over a sample-size grid. Each replicate
// draws its own RNG stream from (master_seed, n, replicate), so results are
// bit-identical regardless of how replicates are partitioned across workers.
struct ExperimentConfig {
    Distribution dist = Distribution::finite({1.0});
    IndexSpec index;
    EstimatorKind estimator = EstimatorKind::Plugin;
    std::vector<std::uint64_t> n_grid;
    std::uint64_t replicates = 0; // >= 100
    std::uint64_t master_seed = 0;
    bool estimated_sigma = false; // standardize by sigma_hat instead of sigma
    // Rate exponents of the bounds being probed, echoed into the report:
    // delta for the entropy estimators, epsilon for the jackknife tail term.
    std::optional<double> delta;
    std::optional<double> epsilon;
};

struct GridPoint {
    std::uint64_t n = 0;
    double truth = 0.0; // population value of the functional at this n
    double sigma = 0.0; // asymptotic sd used for standardization
    double kolmogorov = 0.0;
    double dkw_band = 0.0;
    double mean = 0.0;     // of the standardized statistic
    double variance = 0.0; // unbiased, of the standardized statistic
};

struct RateReport {
    std::vector<GridPoint> points;
    bool noise_dominated = false;   // some D_n within 3 DKW radii of zero
    std::optional<LineFit> fit;     // OLS of ln D_n on ln n when meaningful
    std::vector<std::pair<std::string, double>> theoretical_exponents;
};

// Structural validation: m >= 100, strictly increasing grid, estimator-index
// compatibility. Throws std::invalid_argument.
void validate(const ExperimentConfig& config);

// Runs the experiment. Throws infeasible_error when the population value is
// not certifiable or the asymptotic variance is zero at some grid point.
// workers only partitions the replicate loop; it never affects the output.
RateReport run_experiment(const ExperimentConfig& config, unsigned workers = 1);

// Exact sup-distance between the empirical CDF of the samples and the
// standard normal, via the sorted two-sided formula.
double kolmogorov_distance(std::vector<double> samples);

// OLS of ln D on ln n. Requires >= 3 points with D > 0.
LineFit rate_fit(const std::vector<std::pair<std::uint64_t, double>>& points);

} // namespace divent
