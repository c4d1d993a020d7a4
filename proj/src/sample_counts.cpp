#include "divent/sample_counts.hpp"

#include <algorithm>
#include <stdexcept>

namespace divent {

SampleCounts make_sample_counts(std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs) {
    std::sort(pairs.begin(), pairs.end());
    SampleCounts sc;
    sc.counts = std::move(pairs);
    std::uint64_t total = 0;
    std::uint64_t prev_symbol = 0;
    bool first = true;
    for (const auto& [sym, cnt] : sc.counts) {
        if (cnt == 0) throw std::invalid_argument("sample counts must be positive");
        if (!first && sym == prev_symbol)
            throw std::invalid_argument("duplicate symbol in sample counts");
        prev_symbol = sym;
        first = false;
        total += cnt;
    }
    if (total == 0) throw std::invalid_argument("sample counts must be nonempty");
    sc.n = total;
    return sc;
}

SampleCounts counts_from_draws(std::vector<std::uint64_t> draws) {
    if (draws.empty()) throw std::invalid_argument("no draws");
    std::sort(draws.begin(), draws.end());
    SampleCounts sc;
    sc.n = draws.size();
    for (std::size_t i = 0; i < draws.size();) {
        std::size_t j = i;
        while (j < draws.size() && draws[j] == draws[i]) ++j;
        sc.counts.emplace_back(draws[i], static_cast<std::uint64_t>(j - i));
        i = j;
    }
    return sc;
}

} // namespace divent
