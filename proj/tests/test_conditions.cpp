#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "divent/conditions.hpp"
#include "divent/errors.hpp"

using namespace divent;

TEST_CASE("K expression grammar") {
    KExpr e = parse_k_expr("n^0.3");
    CHECK(e.c == 1.0);
    CHECK(e.a == doctest::Approx(0.3).epsilon(1e-15));
    CHECK_FALSE(e.log_factor);
    CHECK(e(100) == 4); // ceil(100^0.3) = ceil(3.98...)
    CHECK(e.text() == "ceil(n^0.3)");

    e = parse_k_expr("ln(n)");
    CHECK(e.log_factor);
    CHECK(e.a == 0.0);
    CHECK(e(100) == 5);
    CHECK(e(1) == 1); // clamped to 1
    CHECK(e.text() == "ceil(ln(n))");

    e = parse_k_expr("2*ln(n)");
    CHECK(e.c == 2.0);
    CHECK(e(10) == 5);

    e = parse_k_expr("0.5 * n^0.25 * ln(n)");
    CHECK(e.c == 0.5);
    CHECK(e.a == 0.25);
    CHECK(e.log_factor);
    CHECK(e.text() == "ceil(0.5*n^0.25*ln(n))");
    CHECK(e(10000) == 47); // ceil(0.5 * 10 * ln 1e4) = ceil(46.05...)

    e = parse_k_expr("1/2");
    CHECK(e.c == 0.5);
    CHECK(e(1000000) == 1);

    e = parse_k_expr("n");
    CHECK(e.a == 1.0);
    CHECK(e(17) == 17);

    e = parse_k_expr("n^1/2");
    CHECK(e.a == 0.5);
    CHECK(e(100) == 10);
}

TEST_CASE("K expression rejections") {
    CHECK_THROWS_AS(parse_k_expr(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_k_expr("n*n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_k_expr("2*3"), std::invalid_argument);
    CHECK_THROWS_AS(parse_k_expr("ln(n)*ln(n)"), std::invalid_argument);
    CHECK_THROWS_AS(parse_k_expr("frob"), std::invalid_argument);
    CHECK_THROWS_AS(parse_k_expr("n^"), std::invalid_argument);
    CHECK_THROWS_AS(parse_k_expr("2**n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_k_expr("-1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_k_expr("0"), std::invalid_argument);
}

TEST_CASE("grid validation") {
    ConditionRequest req;
    req.set = ConditionSet::ShannonPlugin;
    req.delta = 0.2;
    req.k = parse_k_expr("ln(n)");
    const Distribution geo = Distribution::geometric(1.0);

    req.n_grid = {};
    CHECK_THROWS_AS(check_conditions(geo, req), std::invalid_argument);
    req.n_grid = {1, 10};
    CHECK_THROWS_AS(check_conditions(geo, req), std::invalid_argument);
    req.n_grid = {10, 10};
    CHECK_THROWS_AS(check_conditions(geo, req), std::invalid_argument);
    req.n_grid = {100, 10};
    CHECK_THROWS_AS(check_conditions(geo, req), std::invalid_argument);

    req.n_grid = {1000, 10000};
    req.delta = 0.0;
    CHECK_THROWS_AS(check_conditions(geo, req), std::invalid_argument);
    req.delta = 0.5;
    CHECK_THROWS_AS(check_conditions(geo, req), std::invalid_argument);
}

TEST_CASE("geometric tails pass the entropy truncation conditions") {
    ConditionRequest req;
    req.set = ConditionSet::ShannonPlugin;
    req.delta = 0.2;
    req.k = parse_k_expr("ln(n)");
    req.n_grid = {1000, 10000, 100000, 1000000};
    const ConditionCheck check = check_conditions(Distribution::geometric(1.0), req);

    CHECK(check.condition_set == "shannon-plugin");
    CHECK(check.condition_required);
    CHECK(check.k_expr == "ceil(ln(n))");
    REQUIRE(check.k_values.size() == 4);
    CHECK(check.k_values[0] == 7);
    CHECK(check.k_bounds[0] == 8); // ceil(1000^0.3)
    REQUIRE(check.quantities.size() == 2);
    CHECK(check.quantities[0].name == "truncation-mass");
    CHECK(check.quantities[1].name == "truncation-entropy");
    for (const auto& q : check.quantities) {
        CHECK(q.finite);
        CHECK(q.bounded);
        CHECK(q.values.size() == 4);
    }
    CHECK(check.all_bounded);
}

TEST_CASE("K above the allowed threshold is refused") {
    ConditionRequest req;
    req.set = ConditionSet::ShannonPlugin;
    req.delta = 0.2;
    req.k = parse_k_expr("n");
    req.n_grid = {100, 1000};
    CHECK_THROWS_AS(check_conditions(Distribution::zipf(2.0), req), infeasible_error);
    // message carries the offending grid point
    try {
        check_conditions(Distribution::zipf(2.0), req);
    } catch (const infeasible_error& err) {
        CHECK(std::string(err.what()).find("n = 100") != std::string::npos);
    }
}

TEST_CASE("power-index set checks the smoothness moment sum") {
    ConditionRequest req;
    req.set = ConditionSet::PowerIndex;
    req.n_grid = {100, 1000, 10000};

    // beta missing or out of range
    CHECK_THROWS_AS(check_conditions(Distribution::zipf(2.0), req), std::invalid_argument);
    req.beta = 1.5;
    CHECK_THROWS_AS(check_conditions(Distribution::zipf(2.0), req), std::invalid_argument);

    // beta > 1/2: no extra condition, the quantity degenerates to total mass
    req.beta = 1.0;
    ConditionCheck check = check_conditions(Distribution::zipf(2.0), req);
    CHECK_FALSE(check.condition_required);
    REQUIRE(check.quantities.size() == 1);
    CHECK(check.quantities[0].name == "smoothness-moment-sum");
    for (double v : check.quantities[0].values) CHECK(v == 1.0);
    CHECK(check.all_bounded);

    // beta <= 1/2 on a heavy tail: sum p^{(beta+1)/2} must converge
    req.beta = 0.25;
    check = check_conditions(Distribution::zipf(2.0), req);
    CHECK(check.condition_required);
    CHECK(check.quantities[0].finite); // 2 * 0.625 > 1
    CHECK(check.all_bounded);
}

TEST_CASE("jackknife set adds the light-tail sum and can diverge") {
    ConditionRequest req;
    req.set = ConditionSet::Jackknife;
    req.delta = 0.2;
    req.k = parse_k_expr("ln(n)");
    req.n_grid = {1000, 10000};

    CHECK_THROWS_AS(check_conditions(Distribution::geometric(1.0), req),
                    std::invalid_argument); // epsilon missing
    req.epsilon = 0.4;
    CHECK_THROWS_AS(check_conditions(Distribution::geometric(1.0), req),
                    std::invalid_argument);
    req.epsilon = 0.75;

    ConditionCheck check = check_conditions(Distribution::geometric(1.0), req);
    REQUIRE(check.quantities.size() == 3);
    CHECK(check.quantities[2].name == "light-tail-sum");
    CHECK(check.quantities[2].finite);
    CHECK(check.all_bounded);

    // zipf(2): sum p^{0.25} diverges, so the light-tail quantity blows up
    req.k = parse_k_expr("1"); // keep K below the threshold for zipf too
    check = check_conditions(Distribution::zipf(2.0), req);
    CHECK_FALSE(check.quantities[2].finite);
    CHECK_FALSE(check.quantities[2].bounded);
    CHECK_FALSE(check.all_bounded);
}

TEST_CASE("two-point family routes through with_sample_size") {
    ConditionRequest req;
    req.set = ConditionSet::ShannonPlugin;
    req.delta = 0.2;
    req.k = parse_k_expr("3");
    req.n_grid = {100, 1000, 10000};
    const ConditionCheck check =
        check_conditions(Distribution::perturbed_uniform(0.25, 2), req);
    // truncating after both atoms leaves nothing behind
    for (const auto& q : check.quantities)
        for (double v : q.values) CHECK(v == 0.0);
    CHECK(check.all_bounded);
}

TEST_CASE("condition set names round-trip") {
    for (auto set : {ConditionSet::PowerIndex, ConditionSet::ShannonPlugin,
                     ConditionSet::MillerMadow, ConditionSet::Jackknife})
        CHECK(parse_condition_set(condition_set_name(set)) == set);
    CHECK(parse_condition_set("mm") == ConditionSet::MillerMadow);
    CHECK(parse_condition_set("jk") == ConditionSet::Jackknife);
    CHECK_THROWS_AS(parse_condition_set("bogus"), std::invalid_argument);
}
