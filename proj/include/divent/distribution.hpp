#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "divent/prefix_cache.hpp"
#include "divent/rng.hpp"
#include "divent/sample_counts.hpp"

namespace divent {

// Probability laws on the positive integers used throughout: finite vectors,
// Zipf i^(-lambda), geometric e^(-lambda i), the log-quartic law
// C / (i^4 ln^2 i) on i >= 2, and the two-point perturbed-uniform family
// whose gap shrinks with the sample size n.
//
// Infinite-alphabet functionals (tail masses, tail entropies, moment sums)
// are evaluated with certified truncation: explicit partial sums plus
// analytic tail brackets, with relative error at most tail_tolerance.
// Sampling is exact inverse-CDF over a lazily extended prefix-sum cache that
// is safe to share across threads.
class Distribution {
public:
    enum class Family { Finite, Zipf, Geometric, LogQuartic, PerturbedUniform };

    static Distribution finite(std::vector<double> probs, double tail_tolerance = 1e-12);
    static Distribution zipf(double lambda, double tail_tolerance = 1e-12);
    static Distribution geometric(double lambda, double tail_tolerance = 1e-12);
    static Distribution log_quartic(double tail_tolerance = 1e-12);
    static Distribution perturbed_uniform(double lambda, std::uint64_t n,
                                          double tail_tolerance = 1e-12);

    Family family() const { return family_; }
    double param_lambda() const { return lambda_; }
    std::uint64_t param_n() const { return pu_n_; }
    double tail_tolerance() const { return tol_; }
    const std::vector<double>& finite_probs() const { return probs_; }

    bool finite_support() const;
    std::uint64_t first_symbol() const;
    // Largest symbol of a finite-support law; throws for infinite support.
    std::uint64_t last_symbol() const;

    double pmf(std::uint64_t i) const;
    double norm_constant() const { return norm_; }

    // sum_{i <= k} pmf(i); extends the sampling cache as needed, switching to
    // the complement of the certified tail once k is past the cache horizon.
    double prefix_sum(std::uint64_t k) const;

    // sum_{i >= K} pmf(i)
    double tail_mass(std::uint64_t K) const;

    // -sum_{i >= K} p_i ln p_i  (zero-probability symbols contribute zero)
    double tail_entropy(std::uint64_t K) const;

    // sum_{i >= K} p_i ln^2 p_i, the second log-moment used for Shannon
    // variances.
    double tail_log_sq(std::uint64_t K) const;

    // sum_i p_i^a for a > 0; nullopt when the sum diverges.
    std::optional<double> moment_sum(double a) const;

    // sum_{i >= K} p_i^a with the same convergence condition as moment_sum.
    std::optional<double> power_tail(double a, std::uint64_t K) const;

    std::uint64_t sample_one(Rng& rng) const;
    SampleCounts sample_counts(std::uint64_t n, std::uint64_t seed) const;

    // Triangular-array hook: families whose law depends on the sample size
    // return the adjusted law; fixed laws return themselves.
    bool depends_on_n() const { return family_ == Family::PerturbedUniform; }
    Distribution with_sample_size(std::uint64_t n) const;

private:
    Distribution() = default;
    void init_cache();
    std::uint64_t far_tail_symbol(double u) const; // Zipf beyond the cache horizon

    Family family_ = Family::Finite;
    double lambda_ = 0.0;
    std::uint64_t pu_n_ = 0;
    double tol_ = 1e-12;
    double norm_ = 1.0;
    std::vector<double> probs_; // finite families only
    std::shared_ptr<detail::PrefixCache> cache_;
};

} // namespace divent
