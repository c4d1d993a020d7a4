#pragma once

#include <optional>

#include "divent/distribution.hpp"

namespace divent {

// Diversity functionals theta(P) = sum_i g(p_i). The power family uses
// g(x) = x^mu (1-x)^nu with mu > 0, nu >= 0 and g(0) = 0; Shannon entropy
// uses g(x) = -x ln x, which falls outside the smooth power framework (its
// derivative is unbounded at 0), so it carries no smoothness or rate
// exponent.
struct IndexSpec {
    enum class Kind { Power, Shannon };

    Kind kind = Kind::Shannon;
    double mu = 0.0;
    double nu = 0.0;

    static IndexSpec power(double mu, double nu);
    static IndexSpec shannon() { return IndexSpec{Kind::Shannon, 0.0, 0.0}; }

    bool is_power() const { return kind == Kind::Power; }

    double g(double x) const;
    double g_prime(double x) const;

    // Smoothness exponent of g on [0, 1] and the derived rate exponent;
    // absent for Shannon and outside the power table's domain.
    std::optional<double> holder_beta() const;
    std::optional<double> rate_gamma() const;
};

// Smoothness exponent of x^mu (1-x)^nu. Defined for mu >= 1 and
// nu in {0} union [1, inf):
//   mu > 1, nu > 1   -> min(mu-1, nu-1, 1)
//   mu > 1, nu in {0,1} -> min(mu-1, 1)
//   mu = 1, nu > 1   -> min(nu-1, 1)
//   mu = 1, nu in {0,1} -> 1
std::optional<double> holder_beta(double mu, double nu);

// Rate exponent: beta/2 for beta in (0, 1/2], beta - 1/2 for beta in (1/2, 1].
double gamma_of(double beta);

// Population index sum_i g(p_i) with certified truncation on infinite
// alphabets; nullopt when the defining sum cannot be certified convergent
// (possible only for mu < 1 on heavy tails).
std::optional<double> theta(const Distribution& dist, const IndexSpec& index);

struct Variance {
    double value = 0.0;
    bool degenerate = false; // exact zero (constant influence function)
};

// Asymptotic variance sum p g'(p)^2 - (sum p g'(p))^2 of the plug-in power
// index. Throws std::domain_error for mu < 1, where g' is unbounded at 0.
Variance sigma_sq(const Distribution& dist, const IndexSpec& index);

// Shannon entropy H = -sum p ln p with certified truncation.
double shannon_entropy(const Distribution& dist);

// Var(ln p(X)) = sum p ln^2 p - H^2; degenerate exactly for uniform laws.
Variance shannon_sigma_sq(const Distribution& dist);

// Dispatch helpers over IndexSpec (power or Shannon).
std::optional<double> index_value(const Distribution& dist, const IndexSpec& index);
Variance index_sigma_sq(const Distribution& dist, const IndexSpec& index);

} // namespace divent
