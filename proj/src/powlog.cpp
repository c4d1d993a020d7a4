#include "divent/powlog.hpp"

#include <cmath>
#include <stdexcept>

namespace divent::detail {

namespace {

// E1(z) = Gamma(0, z) by series, for 0 < z < 1.
double exp_integral_small(double z) {
    const double euler = 0.57721566490153286061;
    double sum = -euler - std::log(z);
    double term = 1.0;
    for (int k = 1; k < 64; ++k) {
        term *= -z / k;
        const double add = -term / k;
        sum += add;
        if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// Lentz continued fraction for Gamma(a, z), valid for z >= a + 1 roughly;
// also used at a == 0 with z >= 1.
double upper_gamma_cf(double a, double z) {
    const double tiny = 1e-300;
    double b = z + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 400; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-z + a * std::log(z)) * h;
}

// Lower-gamma series; with Gamma(a) it yields the upper function for
// z < a + 1.
double upper_gamma_series(double a, double z) {
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k < 400; ++k) {
        term *= z / (a + k);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    const double lower = sum * std::exp(-z + a * std::log(z));
    return std::tgamma(a) - lower;
}

} // namespace

double upper_incomplete_gamma(double a, double z) {
    if (!(z > 0.0)) throw std::invalid_argument("upper_incomplete_gamma: z must be > 0");
    if (a < 0.0) {
        // Gamma(a, z) = (Gamma(a+1, z) - z^a e^-z) / a
        const double g1 = upper_incomplete_gamma(a + 1.0, z);
        return (g1 - std::exp(a * std::log(z) - z)) / a;
    }
    if (a == 0.0)
        return z < 1.0 ? exp_integral_small(z) : upper_gamma_cf(0.0, z);
    return z < a + 1.0 ? upper_gamma_series(a, z) : upper_gamma_cf(a, z);
}

PowLogExpr PowLogExpr::term(double coef, double s, double k) {
    PowLogExpr e;
    e.add(coef, s, k);
    return e;
}

PowLogExpr& PowLogExpr::add(double coef, double s, double k) {
    if (coef == 0.0) return *this;
    for (auto& t : terms_) {
        if (t.s == s && t.k == k) {
            t.coef += coef;
            return *this;
        }
    }
    terms_.push_back({coef, s, k});
    return *this;
}

double PowLogExpr::eval(double x) const {
    const double lx = std::log(x);
    double v = 0.0;
    for (const auto& t : terms_) {
        double w = t.coef * std::pow(x, -t.s);
        if (t.k != 0.0) w *= std::pow(lx, t.k);
        v += w;
    }
    return v;
}

PowLogExpr PowLogExpr::derivative() const {
    PowLogExpr d;
    for (const auto& t : terms_) {
        d.add(-t.coef * t.s, t.s + 1.0, t.k);
        if (t.k != 0.0) d.add(t.coef * t.k, t.s + 1.0, t.k - 1.0);
    }
    return d;
}

double PowLogExpr::integral_tail(double N) const {
    const double lnN = std::log(N);
    double v = 0.0;
    for (const auto& t : terms_) {
        if (!(t.s > 1.0))
            throw std::invalid_argument("PowLogExpr::integral_tail: term with s <= 1 diverges");
        const double sm1 = t.s - 1.0;
        double integral;
        const bool int_k = t.k == std::floor(t.k) && t.k >= 0.0 && t.k <= 16.0;
        if (int_k) {
            // I(s, k) = N^(1-s) ln^k N / (s-1) + k/(s-1) * I(s, k-1)
            const int kk = static_cast<int>(t.k);
            double acc = 1.0 / sm1; // I(s, 0) / N^(1-s)
            for (int j = 1; j <= kk; ++j)
                acc = (std::pow(lnN, j) + j * acc) / sm1;
            integral = std::pow(N, -sm1) * acc;
        } else {
            integral = std::pow(sm1, -(t.k + 1.0)) *
                       upper_incomplete_gamma(t.k + 1.0, sm1 * lnN);
        }
        v += t.coef * integral;
    }
    return v;
}

TailSum em_tail_sum(const PowLogExpr& f, std::uint64_t K, double tol, double abs_floor) {
    if (f.empty()) return {0.0, 0.0};
    if (K < 1) throw std::invalid_argument("em_tail_sum: K must be >= 1");

    const PowLogExpr d1 = f.derivative();
    const PowLogExpr d3 = d1.derivative().derivative();
    const PowLogExpr d5 = d3.derivative().derivative();
    const PowLogExpr d7 = d5.derivative().derivative();

    std::uint64_t N = K < 64 ? 64 : K;
    double sum = 0.0, comp = 0.0; // Kahan over [K, N)
    std::uint64_t next = K;
    const std::uint64_t cap = 1ull << 24;

    while (true) {
        for (; next < N; ++next) {
            const double y = f.eval(static_cast<double>(next)) - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        const double x = static_cast<double>(N);
        const double em = f.integral_tail(x) + 0.5 * f.eval(x) - d1.eval(x) / 12.0 +
                          d3.eval(x) / 720.0 - d5.eval(x) / 30240.0;
        const double value = sum + em;
        const double cert = 4.0 * std::abs(d7.eval(x)) / 1209600.0;
        if (cert <= tol * std::max(std::abs(value), abs_floor))
            return {value, cert};
        if (N >= cap)
            throw std::runtime_error("em_tail_sum: tail failed to certify below tolerance");
        N *= 2;
    }
}

} // namespace divent::detail
