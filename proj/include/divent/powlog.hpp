#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace divent::detail {

// Upper incomplete gamma Gamma(a, z) for z > 0 and real a (negative a lifted
// by the downward recurrence). Series / continued-fraction split as in the
// classic gammp/gammq treatment.
double upper_incomplete_gamma(double a, double z);

// One basis term coef * x^(-s) * (ln x)^k with real s, k. Sums of such terms
// are closed under differentiation, and their tail integrals have closed
// forms (elementary for integer k >= 0, incomplete-gamma otherwise), which is
// what makes certified Euler-Maclaurin tail summation possible.
struct PowLogTerm {
    double coef;
    double s;
    double k;
};

class PowLogExpr {
public:
    PowLogExpr() = default;

    static PowLogExpr term(double coef, double s, double k);

    PowLogExpr& add(double coef, double s, double k);

    // Point evaluation; x >= 1 for k >= 0, x > 1 for k < 0.
    double eval(double x) const;

    PowLogExpr derivative() const;

    // Integral over [N, inf). Every term must have s > 1.
    double integral_tail(double N) const;

    bool empty() const { return terms_.empty(); }
    const std::vector<PowLogTerm>& terms() const { return terms_; }

private:
    std::vector<PowLogTerm> terms_;
};

struct TailSum {
    double value;
    double err_bound;
};

// Explicit Kahan summation of term(i) for i in [K, M) plus a certified
// remainder bracket from rem_bracket(M) -> {lo, hi}; M doubles until the
// bracket half-width drops below tol * |value|.
template <class TermF, class BracketF>
double bracket_sum(std::uint64_t K, double tol, TermF term, BracketF rem_bracket,
                   double abs_tol = 1e-300) {
    std::uint64_t M = K < 64 ? 64 : K;
    double sum = 0.0, comp = 0.0;
    std::uint64_t i = K;
    while (true) {
        for (; i < M; ++i) {
            const double y = term(i) - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        const auto [lo, hi] = rem_bracket(M);
        const double value = sum + 0.5 * (lo + hi);
        if (0.5 * (hi - lo) <= tol * (value < 0 ? -value : value) + abs_tol) return value;
        if (M >= (1ull << 26))
            throw std::runtime_error("certified truncation did not converge");
        M *= 2;
    }
}

// sum_{i = K}^{inf} f(i) for f given as a PowLogExpr, via explicit summation
// up to N plus the Euler-Maclaurin tail with Bernoulli corrections through
// B6. The error bound is four times the first omitted correction; N doubles
// until the bound drops below tol * |value| (or the absolute floor). Throws
// std::runtime_error if no N up to the cap certifies.
TailSum em_tail_sum(const PowLogExpr& f, std::uint64_t K, double tol,
                    double abs_floor = 1e-300);

} // namespace divent::detail
