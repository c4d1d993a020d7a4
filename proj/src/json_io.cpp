#include "divent/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace divent::io {

namespace {

std::string fmt17(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void emit(const json& value, std::string& out, int indent, int depth) {
    const bool compact = indent < 0;
    const std::string pad =
        compact ? "" : std::string(static_cast<std::size_t>(indent) * (depth + 1), ' ');
    const std::string close_pad =
        compact ? "" : std::string(static_cast<std::size_t>(indent) * depth, ' ');
    const char* open_nl = compact ? "" : "\n";
    const char* sep = compact ? "," : ",\n";
    switch (value.type()) {
    case json::value_t::object: {
        if (value.empty()) {
            out += "{}";
            return;
        }
        out += "{";
        out += open_nl;
        bool first = true;
        for (const auto& [key, item] : value.items()) {
            if (!first) out += sep;
            first = false;
            out += pad;
            out += nlohmann::json(key).dump();
            out += compact ? ":" : ": ";
            emit(item, out, indent, depth + 1);
        }
        out += open_nl + close_pad + "}";
        return;
    }
    case json::value_t::array: {
        if (value.empty()) {
            out += "[]";
            return;
        }
        out += "[";
        out += open_nl;
        bool first = true;
        for (const auto& item : value) {
            if (!first) out += sep;
            first = false;
            out += pad;
            emit(item, out, indent, depth + 1);
        }
        out += open_nl + close_pad + "]";
        return;
    }
    case json::value_t::number_float:
        out += fmt17(value.get<double>());
        return;
    default:
        out += value.dump();
        return;
    }
}

double require_number(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw std::invalid_argument(std::string("config field missing or not a number: ") + key);
    return j.at(key).get<double>();
}

std::string require_string(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_string())
        throw std::invalid_argument(std::string("config field missing or not a string: ") + key);
    return j.at(key).get<std::string>();
}

} // namespace

std::string dump17(const json& value, int indent) {
    std::string out;
    emit(value, out, indent, 0);
    out += "\n";
    return out;
}

json dist_to_json(const Distribution& dist) {
    json j;
    switch (dist.family()) {
    case Distribution::Family::Finite:
        j["family"] = "finite";
        j["probs"] = dist.finite_probs();
        break;
    case Distribution::Family::Zipf:
        j["family"] = "zipf";
        j["lambda"] = dist.param_lambda();
        break;
    case Distribution::Family::Geometric:
        j["family"] = "geometric";
        j["lambda"] = dist.param_lambda();
        break;
    case Distribution::Family::LogQuartic:
        j["family"] = "log-quartic";
        break;
    case Distribution::Family::PerturbedUniform:
        j["family"] = "perturbed-uniform";
        j["lambda"] = dist.param_lambda();
        j["n"] = dist.param_n();
        break;
    }
    j["tail_tolerance"] = dist.tail_tolerance();
    return j;
}

Distribution dist_from_json(const nlohmann::json& j) {
    if (!j.is_object())
        throw std::invalid_argument("distribution config must be an object");
    const std::string family = require_string(j, "family");
    const double tol = j.contains("tail_tolerance")
                           ? require_number(j, "tail_tolerance")
                           : 1e-12;
    if (family == "finite") {
        if (!j.contains("probs") || !j.at("probs").is_array())
            throw std::invalid_argument("finite family requires a probs array");
        return Distribution::finite(j.at("probs").get<std::vector<double>>(), tol);
    }
    if (family == "zipf")
        return Distribution::zipf(require_number(j, "lambda"), tol);
    if (family == "geometric")
        return Distribution::geometric(require_number(j, "lambda"), tol);
    if (family == "log-quartic") return Distribution::log_quartic(tol);
    if (family == "perturbed-uniform") {
        const double n = require_number(j, "n");
        if (n < 1.0 || n != std::floor(n))
            throw std::invalid_argument("perturbed-uniform requires integer n >= 1");
        return Distribution::perturbed_uniform(require_number(j, "lambda"),
                                               static_cast<std::uint64_t>(n), tol);
    }
    throw std::invalid_argument("unknown distribution family: " + family);
}

json index_to_json(const IndexSpec& index) {
    json j;
    if (index.is_power()) {
        j["kind"] = "power";
        j["mu"] = index.mu;
        j["nu"] = index.nu;
    } else {
        j["kind"] = "shannon";
    }
    return j;
}

IndexSpec index_from_json(const nlohmann::json& j) {
    if (!j.is_object())
        throw std::invalid_argument("index config must be an object");
    const std::string kind = require_string(j, "kind");
    if (kind == "shannon") return IndexSpec::shannon();
    if (kind == "power")
        return IndexSpec::power(require_number(j, "mu"), require_number(j, "nu"));
    throw std::invalid_argument("unknown index kind: " + kind);
}

IndexSpec parse_index_text(const std::string& text) {
    if (text == "shannon") return IndexSpec::shannon();
    const std::string prefix = "power:";
    if (text.rfind(prefix, 0) == 0) {
        const std::string args = text.substr(prefix.size());
        const auto comma = args.find(',');
        if (comma != std::string::npos) {
            try {
                std::size_t used = 0;
                const double mu = std::stod(args.substr(0, comma), &used);
                if (used != comma) throw std::invalid_argument("");
                const std::string nu_text = args.substr(comma + 1);
                const double nu = std::stod(nu_text, &used);
                if (used != nu_text.size()) throw std::invalid_argument("");
                return IndexSpec::power(mu, nu);
            } catch (const std::invalid_argument&) {
                // fall through to the shared diagnostic
            }
        }
    }
    throw std::invalid_argument(
        "index must be \"shannon\" or \"power:MU,NU\", got: " + text);
}

json estimate_to_json(const Estimate& est) {
    json j;
    j["method"] = est.method;
    j["value"] = est.value;
    j["sigma_hat"] = est.sigma_hat;
    j["std_error"] = est.std_error;
    j["ci_low"] = est.ci_low;
    j["ci_high"] = est.ci_high;
    j["level"] = est.level;
    j["degenerate"] = est.degenerate;
    return j;
}

Estimate estimate_from_json(const nlohmann::json& j) {
    Estimate est;
    est.method = require_string(j, "method");
    est.value = require_number(j, "value");
    est.sigma_hat = require_number(j, "sigma_hat");
    est.std_error = require_number(j, "std_error");
    est.ci_low = require_number(j, "ci_low");
    est.ci_high = require_number(j, "ci_high");
    est.level = require_number(j, "level");
    if (!j.contains("degenerate") || !j.at("degenerate").is_boolean())
        throw std::invalid_argument("estimate record missing degenerate flag");
    est.degenerate = j.at("degenerate").get<bool>();
    return est;
}

std::string estimate_csv(const Estimate& est) {
    std::string out = "method,value,sigma_hat,std_error,ci_low,ci_high,level,degenerate\n";
    out += est.method;
    for (double v : {est.value, est.sigma_hat, est.std_error, est.ci_low,
                     est.ci_high, est.level})
        out += "," + fmt17(v);
    out += est.degenerate ? ",true\n" : ",false\n";
    return out;
}

json condition_check_to_json(const ConditionCheck& check) {
    json j;
    j["condition_set"] = check.condition_set;
    j["n_grid"] = check.n_grid;
    j["delta"] = check.delta;
    j["epsilon"] = check.epsilon ? json(*check.epsilon) : json(nullptr);
    j["beta"] = check.beta ? json(*check.beta) : json(nullptr);
    if (!check.k_expr.empty()) {
        j["k_expr"] = check.k_expr;
        j["k_values"] = check.k_values;
        j["k_bounds"] = check.k_bounds;
    }
    j["condition_required"] = check.condition_required;
    json quantities = json::array();
    for (const auto& q : check.quantities) {
        json qj;
        qj["name"] = q.name;
        qj["values"] = q.values;
        qj["grid_max"] = q.grid_max;
        qj["finite"] = q.finite;
        qj["max_at_largest_n"] = q.max_at_largest_n;
        qj["nonincreasing_tail"] = q.nonincreasing_tail;
        qj["bounded"] = q.bounded;
        quantities.push_back(std::move(qj));
    }
    j["quantities"] = std::move(quantities);
    j["all_bounded"] = check.all_bounded;
    return j;
}

json experiment_to_json(const ExperimentConfig& config) {
    json j;
    j["dist"] = dist_to_json(config.dist);
    j["index"] = index_to_json(config.index);
    j["estimator"] = estimator_name(config.estimator);
    j["n_grid"] = config.n_grid;
    j["replicates"] = config.replicates;
    j["master_seed"] = config.master_seed;
    j["standardization"] = config.estimated_sigma ? "estimated-sigma" : "true-sigma";
    j["delta"] = config.delta ? json(*config.delta) : json(nullptr);
    j["epsilon"] = config.epsilon ? json(*config.epsilon) : json(nullptr);
    return j;
}

ExperimentConfig experiment_from_json(const nlohmann::json& root) {
    const nlohmann::json& j =
        root.is_object() && root.contains("resolved_config") ? root.at("resolved_config")
                                                             : root;
    if (!j.is_object())
        throw std::invalid_argument("experiment config must be an object");

    ExperimentConfig config;
    if (!j.contains("dist"))
        throw std::invalid_argument("experiment config requires dist");
    config.dist = dist_from_json(j.at("dist"));
    if (!j.contains("index"))
        throw std::invalid_argument("experiment config requires index");
    config.index = index_from_json(j.at("index"));
    config.estimator = parse_estimator(
        j.contains("estimator") ? require_string(j, "estimator") : "plugin");
    if (!j.contains("n_grid") || !j.at("n_grid").is_array())
        throw std::invalid_argument("experiment config requires an n_grid array");
    config.n_grid = j.at("n_grid").get<std::vector<std::uint64_t>>();
    config.replicates =
        static_cast<std::uint64_t>(require_number(j, "replicates"));
    config.master_seed =
        j.contains("master_seed")
            ? static_cast<std::uint64_t>(require_number(j, "master_seed"))
            : 0;
    if (j.contains("standardization")) {
        const std::string mode = require_string(j, "standardization");
        if (mode == "estimated-sigma")
            config.estimated_sigma = true;
        else if (mode != "true-sigma")
            throw std::invalid_argument("unknown standardization: " + mode);
    }
    if (j.contains("delta") && !j.at("delta").is_null())
        config.delta = require_number(j, "delta");
    if (j.contains("epsilon") && !j.at("epsilon").is_null())
        config.epsilon = require_number(j, "epsilon");
    return config;
}

json rate_report_to_json(const RateReport& report) {
    json j;
    json points = json::array();
    for (const auto& p : report.points) {
        json pj;
        pj["n"] = p.n;
        pj["truth"] = p.truth;
        pj["sigma"] = p.sigma;
        pj["kolmogorov"] = p.kolmogorov;
        pj["dkw_band"] = p.dkw_band;
        pj["mean"] = p.mean;
        pj["variance"] = p.variance;
        points.push_back(std::move(pj));
    }
    j["points"] = std::move(points);
    j["noise_dominated"] = report.noise_dominated;
    if (report.fit) {
        json f;
        f["slope"] = report.fit->slope;
        f["intercept"] = report.fit->intercept;
        f["residual_max"] = report.fit->residual_max;
        j["fit"] = std::move(f);
    } else {
        j["fit"] = nullptr;
    }
    json exps = json::object();
    for (const auto& [name, value] : report.theoretical_exponents)
        exps[name] = value;
    j["theoretical_exponents"] = std::move(exps);
    return j;
}

std::string rate_report_csv(const RateReport& report) {
    std::string out = "n,kolmogorov,dkw_band,mean,variance\n";
    for (const auto& p : report.points) {
        out += std::to_string(p.n);
        for (double v : {p.kolmogorov, p.dkw_band, p.mean, p.variance})
            out += "," + fmt17(v);
        out += "\n";
    }
    return out;
}

std::string atomic_law_csv(const AtomicLaw& law) {
    std::string out = "value,probability\n";
    for (const auto& [v, p] : law.atoms)
        out += fmt17(v) + "," + fmt17(p) + "\n";
    return out;
}

} // namespace divent::io
