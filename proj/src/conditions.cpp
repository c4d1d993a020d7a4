#include "divent/conditions.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "divent/errors.hpp"

namespace divent {

namespace {

std::uint64_t ceil_to_u64(double x, const char* what) {
    if (!(x >= 0.0) || x > 9.2e18)
        throw std::invalid_argument(std::string(what) + " out of range");
    const double c = std::ceil(x);
    const auto v = static_cast<std::uint64_t>(c);
    return v < 1 ? 1 : v;
}

QuantityTrack make_track(std::string name, std::vector<double> values) {
    QuantityTrack track;
    track.name = std::move(name);
    track.values = std::move(values);
    track.grid_max = -std::numeric_limits<double>::infinity();
    std::size_t argmax = 0;
    for (std::size_t i = 0; i < track.values.size(); ++i) {
        const double v = track.values[i];
        if (!std::isfinite(v)) track.finite = false;
        if (v > track.grid_max) {
            track.grid_max = v;
            argmax = i;
        }
    }
    track.max_at_largest_n =
        track.values.size() > 1 && argmax + 1 == track.values.size();
    for (std::size_t i = track.values.size() / 2; i + 1 < track.values.size(); ++i)
        if (track.values[i + 1] > track.values[i]) track.nonincreasing_tail = false;
    track.bounded = track.finite && !track.max_at_largest_n;
    return track;
}

// Parses a rational or decimal literal ("2", "0.5", "1/3").
double parse_coef(const std::string& tok) {
    const auto slash = tok.find('/');
    std::size_t used = 0;
    if (slash == std::string::npos) {
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument("bad number: " + tok);
        return v;
    }
    const double num = std::stod(tok.substr(0, slash), &used);
    if (used != slash) throw std::invalid_argument("bad number: " + tok);
    const double den = std::stod(tok.substr(slash + 1), &used);
    if (used != tok.size() - slash - 1 || den == 0.0)
        throw std::invalid_argument("bad number: " + tok);
    return num / den;
}

} // namespace

std::uint64_t KExpr::operator()(std::uint64_t n) const {
    const double nd = static_cast<double>(n);
    double v = c * std::pow(nd, a);
    if (log_factor) v *= std::log(nd);
    return ceil_to_u64(v, "K(n)");
}

std::string KExpr::text() const {
    std::ostringstream out;
    out << "ceil(";
    bool printed = false;
    if (c != 1.0 || (a == 0.0 && !log_factor)) {
        out << c;
        printed = true;
    }
    if (a != 0.0) {
        if (printed) out << "*";
        out << "n";
        if (a != 1.0) out << "^" << a;
        printed = true;
    }
    if (log_factor) {
        if (printed) out << "*";
        out << "ln(n)";
    }
    out << ")";
    return out.str();
}

KExpr parse_k_expr(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    if (s.empty()) throw std::invalid_argument("empty K expression");

    KExpr expr;
    std::vector<std::string> factors;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == '*') {
            if (i == start) throw std::invalid_argument("bad K expression: " + text);
            factors.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }

    bool saw_coef = false, saw_power = false;
    for (const auto& f : factors) {
        if (f == "ln(n)" || f == "log(n)") {
            if (expr.log_factor)
                throw std::invalid_argument("bad K expression: " + text);
            expr.log_factor = true;
        } else if (f == "n") {
            if (saw_power) throw std::invalid_argument("bad K expression: " + text);
            expr.a = 1.0;
            saw_power = true;
        } else if (f.size() > 2 && f[0] == 'n' && f[1] == '^') {
            if (saw_power) throw std::invalid_argument("bad K expression: " + text);
            expr.a = parse_coef(f.substr(2));
            saw_power = true;
        } else {
            if (saw_coef) throw std::invalid_argument("bad K expression: " + text);
            expr.c = parse_coef(f);
            saw_coef = true;
        }
    }
    if (!(expr.c > 0.0))
        throw std::invalid_argument("K expression coefficient must be positive");
    return expr;
}

ConditionSet parse_condition_set(const std::string& name) {
    if (name == "power-index") return ConditionSet::PowerIndex;
    if (name == "shannon-plugin") return ConditionSet::ShannonPlugin;
    if (name == "miller-madow" || name == "mm") return ConditionSet::MillerMadow;
    if (name == "jackknife" || name == "jk") return ConditionSet::Jackknife;
    throw std::invalid_argument("unknown condition set: " + name);
}

const char* condition_set_name(ConditionSet set) {
    switch (set) {
    case ConditionSet::PowerIndex: return "power-index";
    case ConditionSet::ShannonPlugin: return "shannon-plugin";
    case ConditionSet::MillerMadow: return "miller-madow";
    default: return "jackknife";
    }
}

ConditionCheck check_conditions(const Distribution& dist, const ConditionRequest& req) {
    if (req.n_grid.empty())
        throw std::invalid_argument("n grid must be nonempty");
    for (std::size_t i = 0; i < req.n_grid.size(); ++i) {
        if (req.n_grid[i] < 2)
            throw std::invalid_argument("grid sample sizes must be >= 2");
        if (i > 0 && req.n_grid[i] <= req.n_grid[i - 1])
            throw std::invalid_argument("n grid must be strictly increasing");
    }

    ConditionCheck check;
    check.condition_set = condition_set_name(req.set);
    check.n_grid = req.n_grid;
    check.delta = req.delta;
    check.epsilon = req.epsilon;
    check.beta = req.beta;

    const auto per_n = [&](std::uint64_t n) {
        return dist.depends_on_n() ? dist.with_sample_size(n) : dist;
    };

    if (req.set == ConditionSet::PowerIndex) {
        if (!req.beta || !(*req.beta > 0.0) || !(*req.beta <= 1.0))
            throw std::invalid_argument("power-index check requires beta in (0, 1]");
        check.condition_required = *req.beta <= 0.5;
        const double a = 0.5 * (*req.beta + 1.0);
        std::vector<double> values;
        values.reserve(req.n_grid.size());
        for (std::uint64_t n : req.n_grid) {
            if (a >= 1.0) {
                values.push_back(1.0); // reduces to the total mass
                continue;
            }
            const auto v = per_n(n).moment_sum(a);
            values.push_back(v ? *v : std::numeric_limits<double>::infinity());
        }
        check.quantities.push_back(
            make_track("smoothness-moment-sum", std::move(values)));
    } else {
        if (!(req.delta > 0.0) || !(req.delta < 0.5))
            throw std::invalid_argument("delta must lie in (0, 1/2)");
        check.k_expr = req.k.text();

        std::vector<double> mass_q, entropy_q;
        for (std::uint64_t n : req.n_grid) {
            const std::uint64_t k = req.k(n);
            const std::uint64_t bound =
                ceil_to_u64(std::pow(static_cast<double>(n), 0.5 - req.delta), "K bound");
            check.k_values.push_back(k);
            check.k_bounds.push_back(bound);
            if (k > bound) {
                std::ostringstream msg;
                msg << "K(n) = " << k << " exceeds the allowed threshold " << bound
                    << " at n = " << n;
                throw infeasible_error(msg.str());
            }
            const Distribution dn = per_n(n);
            const double nd = static_cast<double>(n);
            const double scale = std::pow(nd, 0.5 + req.delta);
            mass_q.push_back(scale * std::log(nd) * dn.tail_mass(k));
            entropy_q.push_back(scale * dn.tail_entropy(k));
        }
        check.quantities.push_back(make_track("truncation-mass", std::move(mass_q)));
        check.quantities.push_back(
            make_track("truncation-entropy", std::move(entropy_q)));

        if (req.set == ConditionSet::Jackknife) {
            if (!req.epsilon || !(*req.epsilon > 0.5) || !(*req.epsilon < 1.0))
                throw std::invalid_argument(
                    "jackknife check requires epsilon in (1/2, 1)");
            std::vector<double> tail_q;
            for (std::uint64_t n : req.n_grid) {
                const auto v = per_n(n).moment_sum(1.0 - *req.epsilon);
                tail_q.push_back(v ? *v : std::numeric_limits<double>::infinity());
            }
            check.quantities.push_back(
                make_track("light-tail-sum", std::move(tail_q)));
        }
    }

    check.all_bounded = true;
    for (const auto& q : check.quantities)
        if (!q.bounded) check.all_bounded = false;
    return check;
}

} // namespace divent
