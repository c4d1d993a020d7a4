#include "divent/indices.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "divent/powlog.hpp"

namespace divent {

namespace {

using detail::bracket_sum;

double kahan_sum(const std::vector<double>& probs, double (*f)(double, const IndexSpec&),
                 const IndexSpec& index) {
    double sum = 0.0, comp = 0.0;
    for (double p : probs) {
        if (p <= 0.0) continue;
        const double y = f(p, index) - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

bool all_positive_atoms_equal(const std::vector<double>& probs) {
    double ref = -1.0;
    for (double p : probs) {
        if (p <= 0.0) continue;
        if (ref < 0.0) ref = p;
        else if (p != ref) return false;
    }
    return ref > 0.0;
}

struct Iv {
    double lo, hi;
};

Iv operator+(Iv a, Iv b) { return {a.lo + b.lo, a.hi + b.hi}; }
Iv operator-(Iv a, Iv b) { return {a.lo - b.hi, a.hi - b.lo}; }
Iv operator*(double c, Iv a) { return c >= 0.0 ? Iv{c * a.lo, c * a.hi} : Iv{c * a.hi, c * a.lo}; }

double certified_power_tail(const Distribution& dist, double a, std::uint64_t M) {
    const auto t = dist.power_tail(a, M);
    if (!t) throw std::logic_error("power tail diverged past a convergence check");
    return *t;
}

// Certified bracket for sum_{i >= M} p_i^a (1-p_i)^s, assuming p_i <= 1/2 for
// all i >= M (true for every built-in infinite family once M >= 64) and
// s >= -2.  Expanding (1-p)^s in powers of p turns each order into a certified
// power tail; beyond the kept orders the coefficient ratios stay below 9/8, so
// with p <= 1/2 the dropped part is dominated by a geometric series and fits
// under four times the first dropped term.
Iv pow_one_minus_tail(const Distribution& dist, double a, double s, std::uint64_t M) {
    const int keep = std::max(8, static_cast<int>(std::ceil(std::abs(s))) + 2);
    double coef = 1.0;  // coefficient of p^k in (1-p)^s
    double sum = 0.0, comp = 0.0, abs_sum = 0.0;
    for (int k = 0;; ++k) {
        if (k > 0) coef *= (static_cast<double>(k) - 1.0 - s) / static_cast<double>(k);
        if (coef == 0.0) break;  // integer s: the series terminates exactly
        if (k > keep) {
            const double r = 4.0 * std::abs(coef) * certified_power_tail(dist, a + k, M);
            const double slack = 1e-11 * abs_sum + 1e-300;
            return {sum - r - slack, sum + r + slack};
        }
        const double term = coef * certified_power_tail(dist, a + k, M);
        abs_sum += std::abs(term);
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    const double slack = 1e-11 * abs_sum + 1e-300;
    return {sum - slack, sum + slack};
}

} // namespace

IndexSpec IndexSpec::power(double mu, double nu) {
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw std::invalid_argument("power index requires mu > 0");
    if (!(nu >= 0.0) || !std::isfinite(nu))
        throw std::invalid_argument("power index requires nu >= 0");
    return IndexSpec{Kind::Power, mu, nu};
}

double IndexSpec::g(double x) const {
    if (x <= 0.0) return 0.0;
    if (kind == Kind::Shannon) return -x * std::log(x);
    const double a = std::pow(x, mu);
    return nu == 0.0 ? a : a * std::pow(1.0 - x, nu);
}

double IndexSpec::g_prime(double x) const {
    if (kind == Kind::Shannon)
        return x <= 0.0 ? std::numeric_limits<double>::infinity() : -std::log(x) - 1.0;
    if (x < 0.0) x = 0.0;
    const double t1 = mu * std::pow(x, mu - 1.0) * std::pow(1.0 - x, nu);
    const double t2 = nu == 0.0 ? 0.0 : nu * std::pow(x, mu) * std::pow(1.0 - x, nu - 1.0);
    return t1 - t2;
}

std::optional<double> IndexSpec::holder_beta() const {
    if (kind != Kind::Power) return std::nullopt;
    return divent::holder_beta(mu, nu);
}

std::optional<double> IndexSpec::rate_gamma() const {
    const auto beta = holder_beta();
    if (!beta) return std::nullopt;
    return gamma_of(*beta);
}

std::optional<double> holder_beta(double mu, double nu) {
    if (mu < 1.0 || (nu != 0.0 && nu < 1.0)) return std::nullopt;
    const bool nu_edge = nu == 0.0 || nu == 1.0;
    if (mu > 1.0 && !nu_edge) return std::min({mu - 1.0, nu - 1.0, 1.0});
    if (mu > 1.0) return std::min(mu - 1.0, 1.0);
    if (!nu_edge) return std::min(nu - 1.0, 1.0);
    return 1.0;
}

double gamma_of(double beta) {
    if (!(beta > 0.0) || !(beta <= 1.0))
        throw std::invalid_argument("rate exponent requires beta in (0, 1]");
    return beta <= 0.5 ? 0.5 * beta : beta - 0.5;
}

std::optional<double> theta(const Distribution& dist, const IndexSpec& index) {
    if (!index.is_power()) return shannon_entropy(dist);
    if (dist.finite_support()) {
        return kahan_sum(
            dist.finite_probs(),
            [](double p, const IndexSpec& ix) { return ix.g(p); }, index);
    }
    const std::uint64_t first = dist.first_symbol();
    if (index.nu == 0.0) return dist.power_tail(index.mu, first);
    if (!dist.power_tail(index.mu, first)) return std::nullopt;
    const double value = bracket_sum(
        first, dist.tail_tolerance(),
        [&](std::uint64_t i) { return index.g(dist.pmf(i)); },
        [&](std::uint64_t M) {
            Iv r = pow_one_minus_tail(dist, index.mu, index.nu, M);
            if (r.lo < 0.0) r.lo = 0.0;
            return std::pair<double, double>{r.lo, r.hi};
        });
    return value;
}

Variance sigma_sq(const Distribution& dist, const IndexSpec& index) {
    if (!index.is_power())
        throw std::invalid_argument("sigma_sq requires a power index");
    if (index.mu < 1.0)
        throw std::domain_error(
            "asymptotic variance unavailable for mu < 1: influence unbounded at zero");
    if (index.mu == 1.0 && index.nu == 0.0) return {0.0, true};

    if (dist.finite_support()) {
        const auto& probs = dist.finite_probs();
        if (all_positive_atoms_equal(probs)) return {0.0, true};
        const double mean = kahan_sum(
            probs, [](double p, const IndexSpec& ix) { return p * ix.g_prime(p); }, index);
        double var = 0.0, comp = 0.0;
        for (double p : probs) {
            if (p <= 0.0) continue;
            const double d = index.g_prime(p) - mean;
            const double y = p * d * d - comp;
            const double t = var + y;
            comp = (t - var) - y;
            var = t;
        }
        return {var, var == 0.0};
    }

    const std::uint64_t first = dist.first_symbol();
    const double tol = dist.tail_tolerance();
    const double mu = index.mu, nu = index.nu;
    if (nu == 0.0) {
        // g'(p) = mu p^{mu-1}: both moments reduce to plain power sums.
        const double pm = certified_power_tail(dist, mu, first);
        const double s2 = mu * mu * certified_power_tail(dist, 2.0 * mu - 1.0, first);
        const double var = s2 - mu * mu * pm * pm;
        return {var > 0.0 ? var : 0.0, false};
    }
    // p g'(p) = mu p^mu (1-p)^nu - nu p^{mu+1} (1-p)^{nu-1}; the second moment
    // expands the same way, so every remainder is a combination of certified
    // power-times-(1-p) tails.
    const auto moment_tail = [&](std::uint64_t M) {
        return mu * pow_one_minus_tail(dist, mu, nu, M) -
               nu * pow_one_minus_tail(dist, mu + 1.0, nu - 1.0, M);
    };
    const double mean = bracket_sum(
        first, tol,
        [&](std::uint64_t i) {
            const double p = dist.pmf(i);
            return p * index.g_prime(p);
        },
        [&](std::uint64_t M) {
            const Iv r = moment_tail(M);
            return std::pair<double, double>{r.lo, r.hi};
        },
        tol);
    const double var = bracket_sum(
        first, tol,
        [&](std::uint64_t i) {
            const double p = dist.pmf(i);
            const double d = index.g_prime(p) - mean;
            return p * d * d;
        },
        [&](std::uint64_t M) {
            const Iv sq = (mu * mu) * pow_one_minus_tail(dist, 2.0 * mu - 1.0, 2.0 * nu, M) -
                          (2.0 * mu * nu) * pow_one_minus_tail(dist, 2.0 * mu, 2.0 * nu - 1.0, M) +
                          (nu * nu) * pow_one_minus_tail(dist, 2.0 * mu + 1.0, 2.0 * nu - 2.0, M);
            const double mm = mean * mean * dist.tail_mass(M);
            Iv r = sq - (2.0 * mean) * moment_tail(M) + Iv{mm, mm};
            if (r.lo < 0.0) r.lo = 0.0;
            return std::pair<double, double>{r.lo, r.hi};
        },
        tol);
    return {var > 0.0 ? var : 0.0, false};
}

double shannon_entropy(const Distribution& dist) {
    return dist.tail_entropy(dist.first_symbol());
}

Variance shannon_sigma_sq(const Distribution& dist) {
    if (dist.finite_support()) {
        const auto& probs = dist.finite_probs();
        if (all_positive_atoms_equal(probs)) return {0.0, true};
        double h = 0.0, comp = 0.0;
        for (double p : probs) {
            if (p <= 0.0) continue;
            const double y = -p * std::log(p) - comp;
            const double t = h + y;
            comp = (t - h) - y;
            h = t;
        }
        double var = 0.0;
        comp = 0.0;
        for (double p : probs) {
            if (p <= 0.0) continue;
            const double d = -std::log(p) - h;
            const double y = p * d * d - comp;
            const double t = var + y;
            comp = (t - var) - y;
            var = t;
        }
        return {var, var == 0.0};
    }
    const std::uint64_t first = dist.first_symbol();
    const double h = dist.tail_entropy(first);
    const double m2 = dist.tail_log_sq(first);
    const double var = m2 - h * h;
    return {var > 0.0 ? var : 0.0, false};
}

std::optional<double> index_value(const Distribution& dist, const IndexSpec& index) {
    if (!index.is_power()) return shannon_entropy(dist);
    return theta(dist, index);
}

Variance index_sigma_sq(const Distribution& dist, const IndexSpec& index) {
    if (!index.is_power()) return shannon_sigma_sq(dist);
    return sigma_sq(dist, index);
}

} // namespace divent
