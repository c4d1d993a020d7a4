#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "divent/distribution.hpp"

namespace divent {

// Integer truncation threshold K(n) = ceil(c * n^a * (ln n or 1)). The small
// closed grammar covers thresholds of the shape c*n^a, c*ln(n), c*n^a*ln(n).
struct KExpr {
    double c = 1.0;
    double a = 0.0;
    bool log_factor = false;

    std::uint64_t operator()(std::uint64_t n) const;
    std::string text() const;
};

KExpr parse_k_expr(const std::string& text);

// Hypothesis sets of the normal-approximation guarantees this library
// verifies empirically. PowerIndex is the low-smoothness moment condition of
// the smooth-index bound; the three entropy sets share the truncation-
// threshold conditions, with Jackknife adding the light-tail sum.
enum class ConditionSet { PowerIndex, ShannonPlugin, MillerMadow, Jackknife };

ConditionSet parse_condition_set(const std::string& name);
const char* condition_set_name(ConditionSet set);

// One hypothesis quantity evaluated along the n grid, with verdicts derived
// purely from the values (no hidden thresholds).
struct QuantityTrack {
    std::string name;
    std::vector<double> values;
    double grid_max = 0.0;
    bool finite = true;            // every value finite
    bool max_at_largest_n = false; // first argmax is the last grid point
    bool nonincreasing_tail = true; // non-increasing over the last half
    bool bounded = false;          // finite && !max_at_largest_n
};

struct ConditionRequest {
    ConditionSet set = ConditionSet::ShannonPlugin;
    double delta = 0.0;            // entropy sets: in (0, 1/2)
    std::optional<double> epsilon; // Jackknife: in (1/2, 1)
    std::optional<double> beta;    // PowerIndex: in (0, 1]
    KExpr k;                       // entropy sets
    std::vector<std::uint64_t> n_grid;
};

struct ConditionCheck {
    std::string condition_set;
    std::vector<std::uint64_t> n_grid;
    double delta = 0.0;
    std::optional<double> epsilon;
    std::optional<double> beta;
    std::string k_expr;
    std::vector<std::uint64_t> k_values; // K(n) per grid point
    std::vector<std::uint64_t> k_bounds; // ceil(n^{1/2-delta}) per grid point
    bool condition_required = true; // PowerIndex with beta > 1/2 needs nothing
    std::vector<QuantityTrack> quantities;
    bool all_bounded = false;
};

// Evaluates the requested hypothesis set on the grid. Rejects K(n) exceeding
// ceil(n^{1/2-delta}) anywhere on the grid with infeasible_error; the integer
// ceiling matches the integer-valued thresholds the conditions are stated
// for.
ConditionCheck check_conditions(const Distribution& dist, const ConditionRequest& req);

} // namespace divent
