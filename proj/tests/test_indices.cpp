#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "divent/distribution.hpp"
#include "divent/indices.hpp"

using namespace divent;

TEST_CASE("index construction and validation") {
    CHECK_THROWS_AS(IndexSpec::power(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(IndexSpec::power(-2.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(IndexSpec::power(2.0, -0.5), std::invalid_argument);
    const IndexSpec simpson = IndexSpec::power(2.0, 0.0);
    CHECK(simpson.is_power());
    CHECK_FALSE(IndexSpec::shannon().is_power());
}

TEST_CASE("g and g_prime at the boundary") {
    const IndexSpec simpson = IndexSpec::power(2.0, 0.0);
    CHECK(simpson.g(0.0) == 0.0);
    CHECK(simpson.g(0.5) == 0.25);
    CHECK(simpson.g(1.0) == 1.0);
    CHECK(simpson.g_prime(1.0) == 2.0); // nu=0 must not produce 0*inf at x=1

    const IndexSpec h21 = IndexSpec::power(2.0, 1.0);
    CHECK(h21.g(0.5) == doctest::Approx(0.125).epsilon(1e-15));
    // g'(x) = 2x(1-x) - x^2
    CHECK(h21.g_prime(0.5) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(h21.g_prime(1.0) == doctest::Approx(-1.0).epsilon(1e-15));

    const IndexSpec sh = IndexSpec::shannon();
    CHECK(sh.g(1.0) == 0.0);
    CHECK(sh.g(0.0) == 0.0);
    CHECK(std::isinf(sh.g_prime(0.0)));
    CHECK(sh.g_prime(1.0) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("smoothness exponent table over a 12-point grid") {
    struct Row {
        double mu, nu;
        bool has;
        double beta;
    };
    const Row rows[] = {
        {2.0, 0.0, true, 1.0},   // both moments: min(mu-1, 1)
        {1.0, 0.0, true, 1.0},   // mu = 1 edge
        {1.0, 1.0, true, 1.0},
        {2.0, 1.0, true, 1.0},
        {1.5, 0.0, true, 0.5},
        {1.3, 2.0, true, 0.3},   // min(mu-1, nu-1, 1)
        {3.0, 1.2, true, 0.2},
        {1.0, 1.7, true, 0.7},   // min(nu-1, 1)
        {2.0, 3.0, true, 1.0},
        {1.2, 1.2, true, 0.2},
        {0.5, 1.0, false, 0.0},  // mu < 1: no exponent
        {1.0, 0.5, false, 0.0},  // nu in (0,1): no exponent
    };
    for (const auto& r : rows) {
        CAPTURE(r.mu);
        CAPTURE(r.nu);
        const auto beta = holder_beta(r.mu, r.nu);
        CHECK(beta.has_value() == r.has);
        if (r.has) CHECK(*beta == doctest::Approx(r.beta).epsilon(1e-15));
    }
    CHECK(gamma_of(1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(gamma_of(0.5) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(gamma_of(0.3) == doctest::Approx(0.15).epsilon(1e-15));
    CHECK(gamma_of(0.7) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK_THROWS_AS(gamma_of(0.0), std::invalid_argument);
    CHECK_THROWS_AS(gamma_of(1.2), std::invalid_argument);
}

TEST_CASE("theta on finite laws") {
    const auto d = Distribution::finite({0.2, 0.3, 0.5});
    CHECK(*theta(d, IndexSpec::power(2.0, 0.0)) == doctest::Approx(0.38).epsilon(1e-15));
    CHECK(*theta(d, IndexSpec::power(2.0, 1.0)) == doctest::Approx(0.22).epsilon(1e-14));
    const double H = -(0.2 * std::log(0.2) + 0.3 * std::log(0.3) + 0.5 * std::log(0.5));
    CHECK(*theta(d, IndexSpec::shannon()) == doctest::Approx(H).epsilon(1e-15));

    // invariant under permutation and zero-padding of the support
    const auto d2 = Distribution::finite({0.5, 0.0, 0.2, 0.3});
    CHECK(*theta(d2, IndexSpec::power(2.0, 1.0)) ==
          doctest::Approx(0.22).epsilon(1e-14));
    CHECK(*theta(d2, IndexSpec::shannon()) == doctest::Approx(H).epsilon(1e-14));
}

TEST_CASE("theta on zipf(2) hits exact zeta ratios") {
    const auto d = Distribution::zipf(2.0);
    // sum p^2 = zeta(4)/zeta(2)^2 = 2/5
    CHECK(*theta(d, IndexSpec::power(2.0, 0.0)) == doctest::Approx(0.4).epsilon(1e-12));
    // sum p^3 = zeta(6)/zeta(2)^3 = 8/35
    CHECK(*theta(d, IndexSpec::power(3.0, 0.0)) ==
          doctest::Approx(8.0 / 35.0).epsilon(1e-12));
    // divergent cases are absent, not garbage
    CHECK_FALSE(theta(d, IndexSpec::power(0.5, 0.0)).has_value());
    CHECK_FALSE(theta(d, IndexSpec::power(0.5, 2.0)).has_value());
}

TEST_CASE("theta with a (1-p) factor matches brute force") {
    const auto geo = Distribution::geometric(1.0);
    const IndexSpec h21 = IndexSpec::power(2.0, 1.0);
    double b = 0.0;
    for (int i = 200; i >= 1; --i) {
        const double p = geo.pmf(i);
        b += p * p * (1.0 - p);
    }
    CHECK(*theta(geo, h21) == doctest::Approx(b).epsilon(1e-13));

    const auto zipf = Distribution::zipf(2.0);
    const IndexSpec frac = IndexSpec::power(1.5, 2.0);
    double bz = 0.0;
    for (long i = 3000000; i >= 1; --i) {
        const double p = zipf.pmf(static_cast<std::uint64_t>(i));
        bz += std::pow(p, 1.5) * (1.0 - p) * (1.0 - p);
    }
    CHECK(*theta(zipf, frac) == doctest::Approx(bz).epsilon(1e-10));
}

TEST_CASE("sigma_sq closed forms on the perturbed uniform") {
    const IndexSpec simpson = IndexSpec::power(2.0, 0.0);
    for (double lam : {0.1, 0.25, 0.4}) {
        for (std::uint64_t n : {16ull, 1024ull, 1048576ull}) {
            const auto d = Distribution::perturbed_uniform(lam, n);
            const double nn = static_cast<double>(n);
            const double want = std::pow(nn, -2.0 * lam) - std::pow(nn, -4.0 * lam);
            const Variance v = sigma_sq(d, simpson);
            CHECK_FALSE(v.degenerate);
            CHECK(v.value == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("sigma_sq degeneracy and domain errors") {
    const IndexSpec simpson = IndexSpec::power(2.0, 0.0);
    // exact uniform: g'(p) constant, variance exactly zero
    const Variance u = sigma_sq(Distribution::finite({0.25, 0.25, 0.25, 0.25}), simpson);
    CHECK(u.degenerate);
    CHECK(u.value == 0.0);
    // richness (mu=1, nu=0): g(p) = p, variance identically zero
    const Variance r = sigma_sq(Distribution::finite({0.2, 0.8}), IndexSpec::power(1.0, 0.0));
    CHECK(r.degenerate);
    CHECK(r.value == 0.0);
    // single-symbol law with shannon
    const Variance s = shannon_sigma_sq(Distribution::finite({1.0}));
    CHECK(s.degenerate);
    CHECK(s.value == 0.0);
    // unbounded influence at zero
    CHECK_THROWS_AS(sigma_sq(Distribution::finite({0.2, 0.8}), IndexSpec::power(0.5, 0.0)),
                    std::domain_error);
    CHECK_THROWS_AS(sigma_sq(Distribution::zipf(2.0), IndexSpec::power(0.9, 1.0)),
                    std::domain_error);
    CHECK_THROWS_AS(sigma_sq(Distribution::finite({0.5, 0.5}), IndexSpec::shannon()),
                    std::invalid_argument);
}

TEST_CASE("sigma_sq on finite laws matches the direct formula") {
    const auto d = Distribution::finite({0.2, 0.3, 0.5});
    // Simpson: g' = 2p, mean = 2 sum p^2 = 0.76
    const Variance v = sigma_sq(d, IndexSpec::power(2.0, 0.0));
    CHECK(v.value == doctest::Approx(0.0624).epsilon(1e-14));
    CHECK_FALSE(v.degenerate);
    // Shannon: sum p ln^2 p - H^2
    double H = 0.0, m2 = 0.0;
    for (double p : {0.2, 0.3, 0.5}) {
        H -= p * std::log(p);
        m2 += p * std::log(p) * std::log(p);
    }
    const Variance sv = shannon_sigma_sq(d);
    CHECK(sv.value == doctest::Approx(m2 - H * H).epsilon(1e-13));
}

TEST_CASE("sigma_sq on infinite supports") {
    // zipf(2), Simpson: 4(zeta(6)/zeta(2)^3 - (zeta(4)/zeta(2)^2)^2) = 48/175
    const Variance vz = sigma_sq(Distribution::zipf(2.0), IndexSpec::power(2.0, 0.0));
    CHECK(vz.value == doctest::Approx(48.0 / 175.0).epsilon(1e-11));

    // geometric(1) with a (1-p) factor, against brute force
    const auto geo = Distribution::geometric(1.0);
    const IndexSpec h21 = IndexSpec::power(2.0, 1.0);
    double mean = 0.0;
    for (int i = 300; i >= 1; --i) {
        const double p = geo.pmf(i);
        mean += p * h21.g_prime(p);
    }
    double var = 0.0;
    for (int i = 300; i >= 1; --i) {
        const double p = geo.pmf(i);
        const double dlt = h21.g_prime(p) - mean;
        var += p * dlt * dlt;
    }
    const Variance vg = sigma_sq(geo, h21);
    CHECK(vg.value == doctest::Approx(var).epsilon(1e-11));
    CHECK_FALSE(vg.degenerate);

    // fractional nu exercises the negative-exponent tail expansion
    const Variance vf = sigma_sq(geo, IndexSpec::power(1.5, 1.5));
    double meanf = 0.0, varf = 0.0;
    const IndexSpec hf = IndexSpec::power(1.5, 1.5);
    for (int i = 300; i >= 1; --i) meanf += geo.pmf(i) * hf.g_prime(geo.pmf(i));
    for (int i = 300; i >= 1; --i) {
        const double p = geo.pmf(i);
        varf += p * (hf.g_prime(p) - meanf) * (hf.g_prime(p) - meanf);
    }
    CHECK(vf.value == doctest::Approx(varf).epsilon(1e-10));
}

TEST_CASE("shannon entropy and variance on infinite supports") {
    const auto geo = Distribution::geometric(1.0);
    const double C = std::expm1(1.0);
    const double H = -std::log(C) + std::exp(1.0) / std::expm1(1.0);
    CHECK(shannon_entropy(geo) == doctest::Approx(H).epsilon(1e-13));
    const double x = std::exp(-1.0);
    const double s1 = x / ((1 - x) * (1 - x));
    const double s2 = x * (1 + x) / ((1 - x) * (1 - x) * (1 - x));
    const double lc = std::log(C);
    const double m2 = C * (lc * lc * x / (1 - x) - 2.0 * lc * s1 + s2);
    CHECK(shannon_sigma_sq(geo).value == doctest::Approx(m2 - H * H).epsilon(1e-12));

    // zipf: brute-force partial sum with integral remainder below 1e-5
    const auto zipf = Distribution::zipf(2.0);
    double hz = 0.0;
    for (long i = 10000000; i >= 1; --i) {
        const double p = zipf.pmf(static_cast<std::uint64_t>(i));
        hz -= p * std::log(p);
    }
    CHECK(shannon_entropy(zipf) == doctest::Approx(hz).epsilon(1e-5));
}

TEST_CASE("dispatchers route by index kind") {
    const auto d = Distribution::finite({0.2, 0.3, 0.5});
    CHECK(*index_value(d, IndexSpec::shannon()) == *theta(d, IndexSpec::shannon()));
    CHECK(*index_value(d, IndexSpec::power(2.0, 0.0)) == 0.38);
    CHECK(index_sigma_sq(d, IndexSpec::shannon()).value == shannon_sigma_sq(d).value);
    CHECK(index_sigma_sq(d, IndexSpec::power(2.0, 0.0)).value ==
          sigma_sq(d, IndexSpec::power(2.0, 0.0)).value);
}
