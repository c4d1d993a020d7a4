#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace divent {

// Observed multinomial counts: (symbol, count) pairs sorted by symbol with
// every count positive, plus the sample size n (the sum of counts).
struct SampleCounts {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> counts;
    std::uint64_t n = 0;

    std::uint64_t distinct() const { return counts.size(); }
};

// Builds SampleCounts from raw pairs; validates ordering invariants and
// positive counts, recomputes n. Throws std::invalid_argument on violation.
SampleCounts make_sample_counts(std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs);

// Builds SampleCounts from a list of drawn symbols (any order).
SampleCounts counts_from_draws(std::vector<std::uint64_t> draws);

} // namespace divent
