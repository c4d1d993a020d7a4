#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "divent/distribution.hpp"
#include "divent/rng.hpp"

using namespace divent;

namespace {

// Brute-force partial sum of f(i) for i in [K, limit).
template <typename F>
double brute(std::uint64_t K, std::uint64_t limit, F f) {
    double sum = 0.0, comp = 0.0;
    for (std::uint64_t i = K; i < limit; ++i) {
        const double y = f(i) - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

} // namespace

TEST_CASE("factory validation") {
    CHECK_THROWS_AS(Distribution::zipf(1.0), std::invalid_argument);
    CHECK_THROWS_AS(Distribution::zipf(0.5), std::invalid_argument);
    CHECK_THROWS_AS(Distribution::geometric(0.0), std::invalid_argument);
    CHECK_THROWS_AS(Distribution::geometric(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(Distribution::finite({}), std::invalid_argument);
    CHECK_THROWS_AS(Distribution::finite({0.5, -0.1, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(Distribution::finite({0.5, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(Distribution::perturbed_uniform(0.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(Distribution::perturbed_uniform(0.5, 8), std::invalid_argument);
    CHECK_THROWS_AS(Distribution::perturbed_uniform(0.25, 0), std::invalid_argument);
}

TEST_CASE("zipf normalization and pmf") {
    const auto d = Distribution::zipf(2.0);
    // 1/zeta(2) = 6/pi^2
    CHECK(d.norm_constant() == doctest::Approx(6.0 / (M_PI * M_PI)).epsilon(1e-13));
    CHECK(d.pmf(1) == doctest::Approx(d.norm_constant()).epsilon(1e-15));
    CHECK(d.pmf(10) == doctest::Approx(d.norm_constant() / 100.0).epsilon(1e-15));
    CHECK(d.first_symbol() == 1);
    CHECK_FALSE(d.finite_support());
    CHECK_FALSE(d.depends_on_n());
}

TEST_CASE("geometric normalization closed form") {
    for (double lam : {0.5, 1.0, 2.0}) {
        const auto d = Distribution::geometric(lam);
        CHECK(d.norm_constant() == doctest::Approx(std::expm1(lam)).epsilon(1e-15));
        CHECK(d.pmf(3) ==
              doctest::Approx(std::expm1(lam) * std::exp(-3.0 * lam)).epsilon(1e-15));
        // pmf sums to one: geometric series is exact
        CHECK(d.tail_mass(1) == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("log-quartic support starts at 2") {
    const auto d = Distribution::log_quartic();
    CHECK(d.first_symbol() == 2);
    CHECK(d.pmf(1) == 0.0);
    const double l2 = std::log(2.0);
    CHECK(d.pmf(2) == doctest::Approx(d.norm_constant() / (16.0 * l2 * l2)).epsilon(1e-15));
    // norm constant against brute force (tail beyond 3e6 is ~1e-21)
    const double s =
        brute(2, 3000000, [&](std::uint64_t i) {
            const double x = static_cast<double>(i), l = std::log(x);
            return 1.0 / (x * x * x * x * l * l);
        });
    CHECK(d.norm_constant() == doctest::Approx(1.0 / s).epsilon(1e-11));
}

TEST_CASE("perturbed uniform is the two-point law tilted by n^{-lambda}") {
    const std::uint64_t n = 1024;
    const auto d = Distribution::perturbed_uniform(0.25, n);
    CHECK(d.finite_support());
    CHECK(d.depends_on_n());
    REQUIRE(d.finite_probs().size() == 2);
    const double bump = 0.5 * std::pow(static_cast<double>(n), -0.25);
    CHECK(d.pmf(1) == doctest::Approx(0.5 + bump).epsilon(1e-15));
    CHECK(d.pmf(2) == doctest::Approx(0.5 - bump).epsilon(1e-15));
    CHECK(d.pmf(1) + d.pmf(2) == 1.0); // exact by construction

    const auto resized = d.with_sample_size(64);
    CHECK(resized.param_n() == 64);
    CHECK(resized.pmf(1) == doctest::Approx(0.5 + 0.5 * std::pow(64.0, -0.25)).epsilon(1e-15));
}

TEST_CASE("tail_mass equals one minus the head sum") {
    const auto zipf = Distribution::zipf(1.5);
    const auto geo = Distribution::geometric(0.7);
    const auto lq = Distribution::log_quartic();
    for (const auto* d : {&zipf, &geo, &lq}) {
        for (std::uint64_t K : {1ull, 2ull, 17ull, 1000ull}) {
            if (K < d->first_symbol()) continue;
            const double head =
                brute(d->first_symbol(), K, [&](std::uint64_t i) { return d->pmf(i); });
            CHECK(d->tail_mass(K) == doctest::Approx(1.0 - head).epsilon(1e-11));
        }
    }
}

TEST_CASE("tail functionals split consistently across K") {
    // f(first) == head terms + f(K) for every certified tail functional;
    // exercises the analytic continuation across the explicit/tail boundary.
    const auto zipf = Distribution::zipf(2.0);
    const auto geo = Distribution::geometric(1.0);
    const auto lq = Distribution::log_quartic();
    for (const auto* d : {&zipf, &geo, &lq}) {
        const std::uint64_t first = d->first_symbol();
        for (std::uint64_t K : {first + 3, first + 40, first + 500}) {
            const double head_ent = brute(first, K, [&](std::uint64_t i) {
                const double p = d->pmf(i);
                return p > 0.0 ? -p * std::log(p) : 0.0;
            });
            CHECK(d->tail_entropy(first) ==
                  doctest::Approx(head_ent + d->tail_entropy(K)).epsilon(1e-12));
            const double head_lsq = brute(first, K, [&](std::uint64_t i) {
                const double p = d->pmf(i);
                const double l = std::log(p);
                return p * l * l;
            });
            CHECK(d->tail_log_sq(first) ==
                  doctest::Approx(head_lsq + d->tail_log_sq(K)).epsilon(1e-12));
            const double head_pow =
                brute(first, K, [&](std::uint64_t i) { return std::pow(d->pmf(i), 1.25); });
            CHECK(*d->power_tail(1.25, first) ==
                  doctest::Approx(head_pow + *d->power_tail(1.25, K)).epsilon(1e-12));
        }
    }
}

TEST_CASE("geometric tail functionals against closed forms") {
    const double lam = 1.0;
    const auto d = Distribution::geometric(lam);
    const double C = std::expm1(lam);
    const double x = std::exp(-lam);
    // H = -ln C + lambda * e^lambda / (e^lambda - 1)
    const double H = -std::log(C) + lam * std::exp(lam) / std::expm1(lam);
    CHECK(d.tail_entropy(1) == doctest::Approx(H).epsilon(1e-13));
    // sum i x^i = x/(1-x)^2, sum i^2 x^i = x(1+x)/(1-x)^3
    const double s1 = x / ((1.0 - x) * (1.0 - x));
    const double s2 = x * (1.0 + x) / ((1.0 - x) * (1.0 - x) * (1.0 - x));
    const double lc = std::log(C);
    const double lsq = C * (lc * lc * x / (1.0 - x) - 2.0 * lam * lc * s1 + lam * lam * s2);
    CHECK(d.tail_log_sq(1) == doctest::Approx(lsq).epsilon(1e-13));
    // power tail: sum (C e^{-lam i})^a = C^a x^a/(1-x^a)
    const double a = 1.6;
    const double pa = std::pow(C, a) * std::pow(x, a) / (1.0 - std::pow(x, a));
    CHECK(*d.power_tail(a, 1) == doctest::Approx(pa).epsilon(1e-13));
}

TEST_CASE("zipf power tail against brute force") {
    const auto d = Distribution::zipf(2.0);
    // a=2: sum p^2 = C^2 zeta(4) = (6/pi^2)^2 pi^4/90 = 36/90
    CHECK(*d.power_tail(2.0, 1) == doctest::Approx(0.4).epsilon(1e-13));
    const double b =
        brute(1, 2000000, [&](std::uint64_t i) { return std::pow(d.pmf(i), 1.75); });
    CHECK(*d.power_tail(1.75, 1) == doctest::Approx(b).epsilon(1e-9));
}

TEST_CASE("moment_sum convergence domain") {
    const auto zipf = Distribution::zipf(2.0);
    CHECK_FALSE(zipf.moment_sum(0.4).has_value()); // lambda*a = 0.8 <= 1: diverges
    CHECK_FALSE(zipf.moment_sum(0.5).has_value()); // boundary: diverges
    CHECK(zipf.moment_sum(0.75).has_value());
    const auto lq = Distribution::log_quartic();
    CHECK_FALSE(lq.moment_sum(0.25).has_value()); // 4a = 1 with log exponent 1/2: diverges
    CHECK(lq.moment_sum(0.3).has_value());
    const auto geo = Distribution::geometric(1.0);
    const double a = 0.5;
    const double C = std::expm1(1.0);
    const double xa = std::exp(-a);
    CHECK(*geo.moment_sum(a) ==
          doctest::Approx(std::pow(C, a) * xa / (1.0 - xa)).epsilon(1e-13));
}

TEST_CASE("sampling is reproducible and concentrates correctly") {
    const auto d = Distribution::geometric(1.0);
    const std::uint64_t n = 100000;
    const std::uint64_t seed = derive_seed(7, n, 0);
    const SampleCounts a = d.sample_counts(n, seed);
    const SampleCounts b = d.sample_counts(n, seed);
    REQUIRE(a.counts.size() == b.counts.size());
    CHECK(a.counts == b.counts);
    CHECK(a.n == n);

    std::uint64_t total = 0;
    double phat1 = 0.0;
    for (const auto& [sym, cnt] : a.counts) {
        total += cnt;
        CHECK(cnt > 0);
        if (sym == 1) phat1 = static_cast<double>(cnt) / static_cast<double>(n);
    }
    CHECK(total == n);
    // 5-sigma binomial band around p_1
    const double p1 = d.pmf(1);
    CHECK(std::abs(phat1 - p1) <= 5.0 * std::sqrt(p1 * (1.0 - p1) / n));

    // different replicate index gives a different draw
    const SampleCounts c = d.sample_counts(n, derive_seed(7, n, 1));
    CHECK(a.counts != c.counts);
}

TEST_CASE("finite sampling respects the support") {
    const auto d = Distribution::finite({0.2, 0.0, 0.8});
    const SampleCounts s = d.sample_counts(5000, 99);
    for (const auto& [sym, cnt] : s.counts) {
        CHECK(sym != 2); // zero-probability symbol never drawn
        CHECK(sym >= 1);
        CHECK(sym <= 3);
        CHECK(cnt > 0);
    }
}
