#pragma once

#include <string>

#include "divent/indices.hpp"
#include "divent/sample_counts.hpp"

namespace divent {

// Estimator families. MillerMadow and Jackknife are entropy-only bias
// corrections; Plugin pairs with any index.
enum class EstimatorKind { Plugin, MillerMadow, Jackknife };

EstimatorKind parse_estimator(const std::string& name); // plugin | mm | jk
const char* estimator_name(EstimatorKind kind);

struct Estimate {
    std::string method; // plugin-power | plugin-shannon | miller-madow | jackknife
    double value = 0.0;
    double sigma_hat = 0.0;
    double std_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double level = 0.0;
    bool degenerate = false; // sigma_hat == 0 (point interval)
};

// Point estimate plus a CLT interval value +- z_{(1+level)/2} sigma_hat/sqrt(n).
Estimate plugin_index(const SampleCounts& counts, const IndexSpec& index,
                      double level = 0.95);
Estimate shannon_plugin(const SampleCounts& counts, double level = 0.95);
Estimate miller_madow(const SampleCounts& counts, double level = 0.95);

struct JackknifeResult {
    Estimate estimate;
    double bias_term = 0.0; // (n-1)/n sum_j (H_n - H^(j)), always >= 0
};
JackknifeResult jackknife(const SampleCounts& counts, double level = 0.95);

// Recompute the interval fields of an existing estimate at a new level.
Estimate confidence_interval(Estimate est, double level);

// Dispatcher used by the CLI and experiment driver.
Estimate estimate(const SampleCounts& counts, EstimatorKind kind,
                  const IndexSpec& index, double level = 0.95);

// Fast paths for tight replicate loops: point value only, and the plug-in
// sigma estimate shared by all three entropy estimators.
double estimator_value(const SampleCounts& counts, EstimatorKind kind,
                       const IndexSpec& index);
double plugin_sigma_hat(const SampleCounts& counts, const IndexSpec& index);

// The jackknife bias term alone (n >= 2).
double jackknife_bias(const SampleCounts& counts);

} // namespace divent
