#include "divent/distribution.hpp"

#include <cmath>
#include <stdexcept>

#include "divent/powlog.hpp"

namespace divent {

namespace {

using detail::PowLogExpr;

constexpr std::uint64_t kCacheHorizon = 1ull << 20;
constexpr std::uint64_t kMaxSymbol = 1ull << 62;

double raw_pmf(Distribution::Family fam, double lambda, double norm, std::uint64_t i) {
    switch (fam) {
    case Distribution::Family::Zipf:
        return norm * std::pow(static_cast<double>(i), -lambda);
    case Distribution::Family::Geometric:
        return norm * std::exp(-lambda * static_cast<double>(i));
    case Distribution::Family::LogQuartic: {
        if (i < 2) return 0.0;
        const double x = static_cast<double>(i);
        const double lx = std::log(x);
        return norm / (x * x * x * x * lx * lx);
    }
    default:
        return 0.0;
    }
}

using detail::bracket_sum;

// Geometric tail helpers over x = e^-lambda, all for sums starting at K >= 1:
// S0 = sum x^i, S1 = sum i x^i, S2 = sum i^2 x^i.
double geo_s0(double x, std::uint64_t K) {
    const double k = static_cast<double>(K);
    return std::pow(x, k) / (1.0 - x);
}

double geo_s1(double x, std::uint64_t K) {
    const double k = static_cast<double>(K);
    const double om = 1.0 - x;
    return std::pow(x, k) * (k - (k - 1.0) * x) / (om * om);
}

double geo_s2(double x, std::uint64_t K) {
    const double k = static_cast<double>(K);
    const double om = 1.0 - x;
    const double a = std::pow(x, k) * (k * k - (k * k - 1.0) * x) / (om * om);
    const double b = 2.0 * std::pow(x, k + 1.0) * (k - (k - 1.0) * x) / (om * om * om);
    return a + b;
}

} // namespace

Distribution Distribution::finite(std::vector<double> probs, double tail_tolerance) {
    if (probs.empty()) throw std::invalid_argument("finite law needs at least one entry");
    double sum = 0.0;
    bool positive = false;
    for (double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p))
            throw std::invalid_argument("finite law entries must be nonnegative reals");
        if (p > 0.0) positive = true;
        sum += p;
    }
    if (!positive) throw std::invalid_argument("finite law needs a strictly positive entry");
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("finite law must sum to 1 within 1e-9");
    if (!(tail_tolerance > 0.0 && tail_tolerance <= 1e-2))
        throw std::invalid_argument("tail_tolerance out of range");
    Distribution d;
    d.family_ = Family::Finite;
    d.tol_ = tail_tolerance;
    d.probs_ = std::move(probs);
    d.init_cache();
    return d;
}

Distribution Distribution::zipf(double lambda, double tail_tolerance) {
    if (!(lambda > 1.0)) throw std::invalid_argument("zipf requires lambda > 1");
    if (!(tail_tolerance > 0.0 && tail_tolerance <= 1e-2))
        throw std::invalid_argument("tail_tolerance out of range");
    Distribution d;
    d.family_ = Family::Zipf;
    d.lambda_ = lambda;
    d.tol_ = tail_tolerance;
    const double zeta = detail::em_tail_sum(PowLogExpr::term(1.0, lambda, 0.0), 1, 1e-15).value;
    d.norm_ = 1.0 / zeta;
    d.init_cache();
    return d;
}

Distribution Distribution::geometric(double lambda, double tail_tolerance) {
    if (!(lambda > 0.0)) throw std::invalid_argument("geometric requires lambda > 0");
    if (!(tail_tolerance > 0.0 && tail_tolerance <= 1e-2))
        throw std::invalid_argument("tail_tolerance out of range");
    Distribution d;
    d.family_ = Family::Geometric;
    d.lambda_ = lambda;
    d.tol_ = tail_tolerance;
    d.norm_ = std::expm1(lambda); // 1 / sum_{i>=1} e^(-lambda i)
    d.init_cache();
    return d;
}

Distribution Distribution::log_quartic(double tail_tolerance) {
    if (!(tail_tolerance > 0.0 && tail_tolerance <= 1e-2))
        throw std::invalid_argument("tail_tolerance out of range");
    Distribution d;
    d.family_ = Family::LogQuartic;
    d.tol_ = tail_tolerance;
    const double z = detail::em_tail_sum(PowLogExpr::term(1.0, 4.0, -2.0), 2, 1e-15).value;
    d.norm_ = 1.0 / z;
    d.init_cache();
    return d;
}

Distribution Distribution::perturbed_uniform(double lambda, std::uint64_t n,
                                             double tail_tolerance) {
    if (!(lambda > 0.0 && lambda < 0.5))
        throw std::invalid_argument("perturbed uniform requires lambda in (0, 1/2)");
    if (n == 0) throw std::invalid_argument("perturbed uniform requires n >= 1");
    if (!(tail_tolerance > 0.0 && tail_tolerance <= 1e-2))
        throw std::invalid_argument("tail_tolerance out of range");
    Distribution d;
    d.family_ = Family::PerturbedUniform;
    d.lambda_ = lambda;
    d.pu_n_ = n;
    d.tol_ = tail_tolerance;
    const double p1 = 0.5 + 0.5 * std::pow(static_cast<double>(n), -lambda);
    // 1 - p1 is exact for p1 in [1/2, 1], so the two masses sum to 1 exactly.
    d.probs_ = {p1, 1.0 - p1};
    d.init_cache();
    return d;
}

void Distribution::init_cache() {
    if (family_ == Family::Finite || family_ == Family::PerturbedUniform) {
        auto probs = probs_;
        cache_ = std::make_shared<detail::PrefixCache>(
            [probs](std::uint64_t j) { return j < probs.size() ? probs[j] : 0.0; });
    } else {
        const Family fam = family_;
        const double lam = lambda_, c = norm_;
        const std::uint64_t first = first_symbol();
        cache_ = std::make_shared<detail::PrefixCache>(
            [fam, lam, c, first](std::uint64_t j) { return raw_pmf(fam, lam, c, first + j); });
    }
}

bool Distribution::finite_support() const {
    return family_ == Family::Finite || family_ == Family::PerturbedUniform;
}

std::uint64_t Distribution::first_symbol() const {
    return family_ == Family::LogQuartic ? 2 : 1;
}

std::uint64_t Distribution::last_symbol() const {
    if (!finite_support()) throw std::logic_error("last_symbol on infinite support");
    return probs_.size();
}

double Distribution::pmf(std::uint64_t i) const {
    if (i == 0) return 0.0;
    if (finite_support()) return i <= probs_.size() ? probs_[i - 1] : 0.0;
    if (i < first_symbol()) return 0.0;
    return raw_pmf(family_, lambda_, norm_, i);
}

double Distribution::prefix_sum(std::uint64_t k) const {
    const std::uint64_t first = first_symbol();
    if (k < first) return 0.0;
    std::uint64_t j = k - first; // cache slot of symbol k
    if (finite_support()) {
        const std::uint64_t len = probs_.size();
        if (j >= len) j = len - 1;
        cache_->extend_to(j + 1);
        return cache_->value_at(j);
    }
    if (j < kCacheHorizon) {
        cache_->extend_to(j + 1);
        return cache_->value_at(j);
    }
    return 1.0 - tail_mass(k + 1);
}

double Distribution::tail_mass(std::uint64_t K) const {
    if (K <= first_symbol()) return 1.0;
    switch (family_) {
    case Family::Finite:
    case Family::PerturbedUniform:
        if (K > probs_.size()) return 0.0;
        return 1.0 - prefix_sum(K - 1);
    case Family::Geometric:
        return std::exp(-lambda_ * (static_cast<double>(K) - 1.0));
    case Family::Zipf:
        return detail::em_tail_sum(PowLogExpr::term(norm_, lambda_, 0.0), K, tol_).value;
    case Family::LogQuartic:
        return detail::em_tail_sum(PowLogExpr::term(norm_, 4.0, -2.0), K, tol_).value;
    }
    return 0.0;
}

double Distribution::tail_entropy(std::uint64_t K) const {
    const std::uint64_t first = first_symbol();
    if (K < first) K = first;
    switch (family_) {
    case Family::Finite:
    case Family::PerturbedUniform: {
        double sum = 0.0, comp = 0.0;
        for (std::uint64_t i = K; i <= probs_.size(); ++i) {
            const double p = probs_[i - 1];
            if (p <= 0.0) continue;
            const double y = -p * std::log(p) - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        return sum;
    }
    case Family::Geometric: {
        // -ln p_i = lambda i - ln C
        const double x = std::exp(-lambda_);
        const double lc = std::log(norm_);
        return norm_ * (lambda_ * geo_s1(x, K) - lc * geo_s0(x, K));
    }
    case Family::Zipf: {
        // -ln p_i = lambda ln i - ln C
        const double lc = std::log(norm_);
        PowLogExpr e;
        e.add(lambda_ * norm_, lambda_, 1.0);
        e.add(-lc * norm_, lambda_, 0.0);
        return detail::em_tail_sum(e, K, tol_).value;
    }
    case Family::LogQuartic: {
        // -ln p_i = 4 ln i + 2 ln ln i - ln C, squeezed between kappa * ln i
        // envelopes valid for i >= 16 (ln ln i / ln i is decreasing there and
        // ln C > 0 for this law).
        const double c = norm_;
        const double lc = std::log(c);
        return bracket_sum(
            K, tol_,
            [this](std::uint64_t i) {
                const double p = pmf(i);
                return -p * std::log(p);
            },
            [c, lc, this](std::uint64_t M) {
                const double lnM = std::log(static_cast<double>(M));
                const double kap_hi = 4.0 + 2.0 * std::log(lnM) / lnM;
                const double kap_lo = 4.0 - lc / lnM;
                const double base =
                    detail::em_tail_sum(PowLogExpr::term(c, 4.0, -1.0), M, tol_).value;
                return std::pair{kap_lo * base, kap_hi * base};
            });
    }
    }
    return 0.0;
}

double Distribution::tail_log_sq(std::uint64_t K) const {
    const std::uint64_t first = first_symbol();
    if (K < first) K = first;
    switch (family_) {
    case Family::Finite:
    case Family::PerturbedUniform: {
        double sum = 0.0, comp = 0.0;
        for (std::uint64_t i = K; i <= probs_.size(); ++i) {
            const double p = probs_[i - 1];
            if (p <= 0.0) continue;
            const double l = std::log(p);
            const double y = p * l * l - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        return sum;
    }
    case Family::Geometric: {
        const double x = std::exp(-lambda_);
        const double lc = std::log(norm_);
        return norm_ * (lambda_ * lambda_ * geo_s2(x, K) - 2.0 * lambda_ * lc * geo_s1(x, K) +
                        lc * lc * geo_s0(x, K));
    }
    case Family::Zipf: {
        const double lc = std::log(norm_);
        PowLogExpr e;
        e.add(lambda_ * lambda_ * norm_, lambda_, 2.0);
        e.add(-2.0 * lambda_ * lc * norm_, lambda_, 1.0);
        e.add(lc * lc * norm_, lambda_, 0.0);
        return detail::em_tail_sum(e, K, tol_).value;
    }
    case Family::LogQuartic: {
        const double c = norm_;
        const double lc = std::log(c);
        return bracket_sum(
            K, tol_,
            [this](std::uint64_t i) {
                const double p = pmf(i);
                const double l = std::log(p);
                return p * l * l;
            },
            [c, lc, this](std::uint64_t M) {
                const double lnM = std::log(static_cast<double>(M));
                const double kap_hi = 4.0 + 2.0 * std::log(lnM) / lnM;
                const double kap_lo = 4.0 - lc / lnM;
                const double base =
                    detail::em_tail_sum(PowLogExpr::term(c, 4.0, 0.0), M, tol_).value;
                return std::pair{kap_lo * kap_lo * base, kap_hi * kap_hi * base};
            });
    }
    }
    return 0.0;
}

std::optional<double> Distribution::power_tail(double a, std::uint64_t K) const {
    if (!(a > 0.0)) throw std::invalid_argument("power_tail requires a > 0");
    const std::uint64_t first = first_symbol();
    if (K < first) K = first;
    switch (family_) {
    case Family::Finite:
    case Family::PerturbedUniform: {
        double sum = 0.0, comp = 0.0;
        for (std::uint64_t i = K; i <= probs_.size(); ++i) {
            const double p = probs_[i - 1];
            if (p <= 0.0) continue;
            const double y = std::pow(p, a) - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        return sum;
    }
    case Family::Geometric: {
        const double xa = std::exp(-lambda_ * a);
        return std::pow(norm_, a) * geo_s0(xa, K);
    }
    case Family::Zipf: {
        if (lambda_ * a <= 1.0) return std::nullopt;
        return detail::em_tail_sum(PowLogExpr::term(std::pow(norm_, a), lambda_ * a, 0.0), K,
                                   tol_)
            .value;
    }
    case Family::LogQuartic: {
        // sum i^(-4a) (ln i)^(-2a): converges iff 4a > 1 (at 4a = 1 the log
        // exponent 2a = 1/2 is too weak).
        if (4.0 * a <= 1.0) return std::nullopt;
        return detail::em_tail_sum(
                   PowLogExpr::term(std::pow(norm_, a), 4.0 * a, -2.0 * a), K, tol_)
            .value;
    }
    }
    return std::nullopt;
}

std::optional<double> Distribution::moment_sum(double a) const {
    return power_tail(a, first_symbol());
}

std::uint64_t Distribution::sample_one(Rng& rng) const {
    const double u = rng.next_u01();
    const std::uint64_t first = first_symbol();

    if (finite_support()) {
        const std::uint64_t len = probs_.size();
        if (cache_->size() < len) cache_->extend_to(len);
        const std::uint64_t idx = cache_->upper_bound(u);
        return first + (idx < len ? idx : len - 1);
    }

    if (cache_->size() == 0 || u >= cache_->back()) {
        // Extend toward the horizon until the cached prefix covers u.
        while (cache_->size() < kCacheHorizon && u >= cache_->back()) {
            std::uint64_t target = cache_->size() == 0 ? 1024 : cache_->size() * 2;
            if (target > kCacheHorizon) target = kCacheHorizon;
            cache_->extend_to(target);
        }
        if (u >= cache_->back()) {
            if (family_ == Family::Zipf) return far_tail_symbol(u);
            // Geometric / log-quartic prefixes reach 1 - 2^-53 within a few
            // thousand entries; this path only guards pmf underflow.
            while (true) {
                const double before = cache_->back();
                const std::uint64_t sz = cache_->extend_to(cache_->size() + 4096);
                if (u < cache_->back()) break;
                if (cache_->back() == before || sz >= detail::PrefixCache::kCapacity)
                    return first + cache_->size() - 1;
            }
        }
    }
    return first + cache_->upper_bound(u);
}

// Far tail of a Zipf law: the smallest symbol s with prefix(s) > u, located
// by bisection on the certified tail T(s+1) = C * sum_{i > s} i^-lambda
// without materializing prefix entries.
std::uint64_t Distribution::far_tail_symbol(double u) const {
    const double r = 1.0 - u; // >= 2^-53 since u < 1
    const std::uint64_t K0 = first_symbol() + cache_->size();
    auto tail_after = [this](std::uint64_t s) {
        return detail::em_tail_sum(PowLogExpr::term(norm_, lambda_, 0.0), s + 1, 1e-13).value;
    };
    if (tail_after(K0) < r) return K0;
    std::uint64_t lo = K0, hi = K0;
    do {
        lo = hi;
        hi = hi >= kMaxSymbol / 2 ? kMaxSymbol : hi * 2;
        if (hi >= kMaxSymbol && tail_after(hi) >= r) return kMaxSymbol;
    } while (tail_after(hi) >= r);
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (tail_after(mid) < r)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

SampleCounts Distribution::sample_counts(std::uint64_t n, std::uint64_t seed) const {
    if (n == 0) throw std::invalid_argument("sample size must be positive");
    Rng rng(seed);
    std::vector<std::uint64_t> draws;
    draws.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) draws.push_back(sample_one(rng));
    return counts_from_draws(std::move(draws));
}

Distribution Distribution::with_sample_size(std::uint64_t n) const {
    if (family_ == Family::PerturbedUniform) return perturbed_uniform(lambda_, n, tol_);
    return *this;
}

} // namespace divent
