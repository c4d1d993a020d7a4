#pragma once

#include <array>
#include <atomic>
#include <bit>
#include <cstdint>
#include <functional>
#include <mutex>
#include <utility>

namespace divent::detail {

// Monotone prefix-sum cache over a nonnegative term sequence, safe for
// concurrent readers while one writer extends it. Storage is chunked with
// geometrically growing chunks, so extension never moves published entries;
// the published size is the only synchronization point (release on extend,
// acquire on read). Values are Kahan-compensated running sums of term(0..j).
class PrefixCache {
public:
    explicit PrefixCache(std::function<double(std::uint64_t)> term)
        : term_(std::move(term)) {}

    PrefixCache(const PrefixCache&) = delete;
    PrefixCache& operator=(const PrefixCache&) = delete;

    ~PrefixCache() {
        for (auto& c : chunks_) delete[] c.load(std::memory_order_relaxed);
    }

    std::uint64_t size() const { return size_.load(std::memory_order_acquire); }

    // Entry j must already be published (j < size()).
    double value_at(std::uint64_t j) const {
        const auto [c, off] = locate(j);
        return chunks_[c].load(std::memory_order_relaxed)[off];
    }

    double back() const {
        const std::uint64_t n = size();
        return n == 0 ? 0.0 : value_at(n - 1);
    }

    // Grow so that size() >= count. Returns the new size (may be smaller than
    // count only if the cap was hit).
    std::uint64_t extend_to(std::uint64_t count) {
        std::scoped_lock lk(grow_mutex_);
        std::uint64_t n = size_.load(std::memory_order_relaxed);
        while (n < count && n < kCapacity) {
            const auto [c, off] = locate(n);
            double* chunk = chunks_[c].load(std::memory_order_relaxed);
            if (chunk == nullptr) {
                chunk = new double[chunk_len(c)];
                chunks_[c].store(chunk, std::memory_order_release);
            }
            const double y = term_(n) - kahan_comp_;
            const double t = kahan_sum_ + y;
            kahan_comp_ = (t - kahan_sum_) - y;
            kahan_sum_ = t;
            chunk[off] = t;
            ++n;
            size_.store(n, std::memory_order_release);
        }
        return n;
    }

    // First published index j with value_at(j) > u, or size() if none.
    std::uint64_t upper_bound(double u) const {
        std::uint64_t lo = 0, hi = size();
        // The head chunk is contiguous and usually absorbs nearly all draws.
        if (hi > 64 && value_at(63) > u) hi = 64;
        while (lo < hi) {
            const std::uint64_t mid = lo + (hi - lo) / 2;
            if (value_at(mid) > u)
                hi = mid;
            else
                lo = mid + 1;
        }
        return lo;
    }

    static constexpr std::uint64_t kCapacity = 64ull * ((1ull << 26) - 1);

private:
    static constexpr int kMaxChunks = 26;

    static std::uint64_t chunk_len(int c) { return 64ull << c; }

    // Chunk c holds global indices [64*(2^c - 1), 64*(2^(c+1) - 1)).
    static std::pair<int, std::uint64_t> locate(std::uint64_t j) {
        const std::uint64_t q = j / 64 + 1;
        const int c = std::bit_width(q) - 1;
        return {c, j - 64ull * ((1ull << c) - 1)};
    }

    std::array<std::atomic<double*>, kMaxChunks> chunks_{};
    std::atomic<std::uint64_t> size_{0};
    mutable std::mutex grow_mutex_;
    double kahan_sum_ = 0.0;
    double kahan_comp_ = 0.0;
    std::function<double(std::uint64_t)> term_;
};

} // namespace divent::detail
