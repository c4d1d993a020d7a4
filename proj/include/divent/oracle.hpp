#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "divent/estimators.hpp"

namespace divent {

// Exact sampling distribution of a statistic of multinomial counts: atoms
// (value, probability) sorted by value, equal values merged within 1e-12.
struct AtomicLaw {
    std::vector<std::pair<double, double>> atoms;

    double total_probability() const;
    double mean() const;
    double variance() const;
    double sd() const;
};

// Enumerates every composition (y_1..y_k) of n over k symbols, weights it by
// its multinomial probability (log-space weights), and evaluates the
// statistic. Guarded to k <= 6, n <= 30; larger instances are refused.
AtomicLaw exact_statistic_law(const std::vector<double>& probs, std::uint64_t n,
                              const std::function<double(const SampleCounts&)>& stat);

AtomicLaw exact_estimator_law(const std::vector<double>& probs, std::uint64_t n,
                              EstimatorKind kind, const IndexSpec& index);

// Exact expectation of the estimator over the same enumeration, accumulated
// without atom merging.
double exact_mean(const std::vector<double>& probs, std::uint64_t n,
                  EstimatorKind kind, const IndexSpec& index);

// Exact Kolmogorov distance between the law of (V - center)/scale and the
// standard normal, evaluated at every atom from both sides of the step CDF.
double exact_kolmogorov(const AtomicLaw& law, double center, double scale);

// Exact binomial check of the moment inequality
// E|p_hat - p|^{beta+1} <= 4 p n^{-beta}.
struct MomentBoundCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};
MomentBoundCheck verify_moment_bound(double p, std::uint64_t n, double beta);

// E[estimator] minus the population value of the same functional, both exact.
double exact_bias(const std::vector<double>& probs, std::uint64_t n,
                  EstimatorKind kind, const IndexSpec& index);

// Both sides of the jackknife bias identity
// E[B_jk] = (n-1)(B_n - B_{n-1}), each from exact enumeration.
struct JackknifeIdentity {
    double lhs = 0.0;
    double rhs = 0.0;
};
JackknifeIdentity jackknife_bias_identity(const std::vector<double>& probs,
                                          std::uint64_t n);

} // namespace divent
