// divent: diversity-index and entropy estimation from the command line.
//
// Subcommands: estimate | theta | conditions | rate | oracle.  Every run
// prints its primary output on stdout and a run manifest (enough to reproduce
// the run exactly) either to <out-dir>/manifest.json or, when no output
// directory was requested, as a single JSON line on stderr so stdout stays
// byte-identical across reruns.

#include <cctype>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "divent/conditions.hpp"
#include "divent/errors.hpp"
#include "divent/estimators.hpp"
#include "divent/indices.hpp"
#include "divent/json_io.hpp"
#include "divent/montecarlo.hpp"
#include "divent/oracle.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using divent::io::json;

std::string iso_utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string read_stream(std::istream& in) {
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    return read_stream(in);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

std::string trimmed(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) parts.push_back(item);
    return parts;
}

double parse_double(const std::string& text, const std::string& what) {
    const std::string t = trimmed(text);
    try {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument(what);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse " + what + ": '" + text + "'");
    }
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
    const std::string t = trimmed(text);
    try {
        if (t.empty() || t[0] == '-') throw std::invalid_argument(what);
        std::size_t used = 0;
        const unsigned long long v = std::stoull(t, &used);
        if (used != t.size()) throw std::invalid_argument(what);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse " + what + ": '" + text + "'");
    }
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    for (const auto& item : split_on(text, ',')) out.push_back(parse_double(item, what));
    if (out.empty()) throw std::invalid_argument(what + " list is empty");
    return out;
}

std::vector<std::uint64_t> parse_u64_list(const std::string& text, const std::string& what) {
    std::vector<std::uint64_t> out;
    for (const auto& item : split_on(text, ',')) out.push_back(parse_u64(item, what));
    if (out.empty()) throw std::invalid_argument(what + " list is empty");
    return out;
}

// Distribution configs are accepted inline ('{...}'), as '@path', or as a
// bare path to a JSON file.
divent::Distribution parse_dist_arg(const std::string& arg) {
    std::string text = trimmed(arg);
    if (!text.empty() && text[0] == '@') text = read_file(text.substr(1));
    else if (text.empty() || text[0] != '{') text = read_file(text);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("distribution config is not valid JSON: ") +
                                    e.what());
    }
    return divent::io::dist_from_json(j);
}

std::optional<std::uint64_t> env_seed() {
    const char* raw = std::getenv("DIVENT_SEED");
    if (raw == nullptr || *raw == '\0') return std::nullopt;
    return parse_u64(raw, "DIVENT_SEED");
}

struct ManifestSink {
    std::string subcommand;
    std::string started_at = iso_utc_now();
    std::optional<std::uint64_t> seed;
    json resolved_config = json::object();
    std::vector<std::string> outputs;
    std::string out_dir; // empty: manifest goes to stderr as one line

    void emit() const {
        json m;
        m["subcommand"] = subcommand;
        m["version"] = kVersion;
        if (seed) m["seed"] = *seed;
        else m["seed"] = nullptr;
        m["started_at"] = started_at;
        m["finished_at"] = iso_utc_now();
        m["resolved_config"] = resolved_config;
        m["outputs"] = outputs;
        if (out_dir.empty()) {
            std::cerr << divent::io::dump17(m, -1);
        } else {
            write_file(out_dir + "/manifest.json", divent::io::dump17(m));
        }
    }
};

void prepare_out_dir(ManifestSink& manifest, const std::string& out_dir) {
    manifest.out_dir = out_dir;
    if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
}

// ---------------------------------------------------------------- estimate

divent::SampleCounts counts_from_tokens(const std::string& text) {
    std::map<std::string, std::uint64_t> tally;
    std::istringstream in(text);
    std::string token;
    std::vector<std::string> order;
    while (in >> token) {
        auto [it, fresh] = tally.try_emplace(token, 0);
        if (fresh) order.push_back(token);
        ++it->second;
    }
    if (order.empty()) throw std::invalid_argument("input contains no tokens");
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
    pairs.reserve(order.size());
    for (std::uint64_t id = 0; id < order.size(); ++id)
        pairs.emplace_back(id, tally[order[id]]);
    return divent::make_sample_counts(std::move(pairs));
}

divent::SampleCounts counts_from_csv(const std::string& text) {
    std::map<std::string, std::uint64_t> tally;
    std::vector<std::string> order;
    std::istringstream in(text);
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string row = trimmed(line);
        if (row.empty()) continue;
        const auto comma = row.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("line " + std::to_string(lineno) +
                                        ": expected 'symbol,count', got '" + row + "'");
        const std::string symbol = trimmed(row.substr(0, comma));
        const std::string count_text = trimmed(row.substr(comma + 1));
        if (symbol.empty())
            throw std::invalid_argument("line " + std::to_string(lineno) + ": empty symbol");
        std::uint64_t count = 0;
        try {
            count = parse_u64(count_text, "count");
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument("line " + std::to_string(lineno) +
                                        ": count must be a nonnegative integer, got '" +
                                        count_text + "'");
        }
        auto [it, fresh] = tally.try_emplace(symbol, 0);
        if (fresh) order.push_back(symbol);
        it->second += count;
    }
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
    std::uint64_t id = 0;
    for (const auto& symbol : order) {
        const std::uint64_t count = tally[symbol];
        if (count > 0) pairs.emplace_back(id++, count);
    }
    if (pairs.empty()) throw std::invalid_argument("input contains no positive counts");
    return divent::make_sample_counts(std::move(pairs));
}

int cmd_estimate(const std::string& input, const std::string& format,
                 const std::string& index_text, const std::string& estimator_name,
                 double level, bool csv, const std::string& out_dir) {
    ManifestSink manifest;
    manifest.subcommand = "estimate";
    prepare_out_dir(manifest, out_dir);

    const std::string text = input == "-" ? read_stream(std::cin) : read_file(input);
    divent::SampleCounts counts;
    if (format == "tokens") counts = counts_from_tokens(text);
    else if (format == "csv") counts = counts_from_csv(text);
    else throw std::invalid_argument("unknown input format: " + format);

    const divent::IndexSpec index = divent::io::parse_index_text(index_text);
    const divent::EstimatorKind kind = divent::parse_estimator(estimator_name);
    const divent::Estimate est = divent::estimate(counts, kind, index, level);

    manifest.resolved_config["input"] = input;
    manifest.resolved_config["format"] = format;
    manifest.resolved_config["index"] = divent::io::index_to_json(index);
    manifest.resolved_config["estimator"] = divent::estimator_name(kind);
    manifest.resolved_config["level"] = level;
    manifest.resolved_config["n"] = counts.n;
    manifest.resolved_config["distinct"] = counts.distinct();

    const std::string json_text = divent::io::dump17(divent::io::estimate_to_json(est));
    const std::string csv_text = divent::io::estimate_csv(est);
    std::cout << (csv ? csv_text : json_text);
    manifest.outputs.push_back("stdout");
    if (!out_dir.empty()) {
        write_file(out_dir + "/estimate.json", json_text);
        write_file(out_dir + "/estimate.csv", csv_text);
        manifest.outputs.push_back(out_dir + "/estimate.json");
        manifest.outputs.push_back(out_dir + "/estimate.csv");
    }
    manifest.emit();
    return 0;
}

// ------------------------------------------------------------------- theta

int cmd_theta(const std::string& dist_arg, const std::string& index_text,
              const std::string& out_dir) {
    ManifestSink manifest;
    manifest.subcommand = "theta";
    prepare_out_dir(manifest, out_dir);

    const divent::Distribution dist = parse_dist_arg(dist_arg);
    const divent::IndexSpec index = divent::io::parse_index_text(index_text);

    json out;
    out["dist"] = divent::io::dist_to_json(dist);
    out["index"] = divent::io::index_to_json(index);
    const auto value = divent::index_value(dist, index);
    out["value"] = value ? json(*value) : json(nullptr);

    // sigma is reported as null when the influence function is unbounded
    // (power indices with mu < 1) instead of failing the whole query.
    out["sigma_sq"] = nullptr;
    out["degenerate"] = nullptr;
    if (value) {
        try {
            const divent::Variance v = divent::index_sigma_sq(dist, index);
            out["sigma_sq"] = v.value;
            out["degenerate"] = v.degenerate;
        } catch (const std::domain_error&) {
        }
    }

    std::optional<double> beta;
    if (index.is_power()) beta = index.holder_beta();
    out["beta"] = beta ? json(*beta) : json(nullptr);
    out["gamma"] = beta ? json(divent::gamma_of(*beta)) : json(nullptr);

    manifest.resolved_config["dist"] = out["dist"];
    manifest.resolved_config["index"] = out["index"];

    const std::string text = divent::io::dump17(out);
    std::cout << text;
    manifest.outputs.push_back("stdout");
    if (!out_dir.empty()) {
        write_file(out_dir + "/theta.json", text);
        manifest.outputs.push_back(out_dir + "/theta.json");
    }
    manifest.emit();
    return 0;
}

// -------------------------------------------------------------- conditions

int cmd_conditions(const std::string& dist_arg, const std::string& check_name,
                   double delta, std::optional<double> epsilon, std::optional<double> beta,
                   const std::string& index_text, const std::string& k_text,
                   const std::string& grid_text, const std::string& out_dir) {
    ManifestSink manifest;
    manifest.subcommand = "conditions";
    prepare_out_dir(manifest, out_dir);

    const divent::Distribution dist = parse_dist_arg(dist_arg);
    divent::ConditionRequest req;
    req.set = divent::parse_condition_set(check_name);
    req.delta = delta;
    req.epsilon = epsilon;
    req.beta = beta;
    if (!req.beta && !index_text.empty()) {
        const divent::IndexSpec index = divent::io::parse_index_text(index_text);
        req.beta = index.holder_beta();
        if (!req.beta)
            throw std::invalid_argument(
                "index has no smoothness exponent; pass --beta explicitly");
    }
    req.k = divent::parse_k_expr(k_text);
    req.n_grid = parse_u64_list(grid_text, "n-grid entry");

    const divent::ConditionCheck check = divent::check_conditions(dist, req);

    manifest.resolved_config["dist"] = divent::io::dist_to_json(dist);
    manifest.resolved_config["check"] = check.condition_set;
    manifest.resolved_config["delta"] = delta;
    manifest.resolved_config["epsilon"] = epsilon ? json(*epsilon) : json(nullptr);
    manifest.resolved_config["beta"] = req.beta ? json(*req.beta) : json(nullptr);
    manifest.resolved_config["K"] = check.k_expr;
    manifest.resolved_config["n_grid"] = check.n_grid;

    const std::string text = divent::io::dump17(divent::io::condition_check_to_json(check));
    std::cout << text;
    manifest.outputs.push_back("stdout");
    if (!out_dir.empty()) {
        write_file(out_dir + "/conditions.json", text);
        manifest.outputs.push_back(out_dir + "/conditions.json");
    }
    manifest.emit();
    return 0;
}

// -------------------------------------------------------------------- rate

int cmd_rate(const std::string& config_path, unsigned workers,
             std::optional<std::uint64_t> seed_flag, const std::string& out_dir) {
    ManifestSink manifest;
    manifest.subcommand = "rate";
    prepare_out_dir(manifest, out_dir);

    nlohmann::json config_json;
    try {
        config_json = nlohmann::json::parse(read_file(config_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("experiment config is not valid JSON: ") +
                                    e.what());
    }
    divent::ExperimentConfig config = divent::io::experiment_from_json(config_json);
    if (const auto seed = seed_flag ? seed_flag : env_seed()) config.master_seed = *seed;
    if (workers == 0) throw std::invalid_argument("--workers must be at least 1");

    const divent::RateReport report = divent::run_experiment(config, workers);

    manifest.seed = config.master_seed;
    manifest.resolved_config = divent::io::experiment_to_json(config);
    manifest.resolved_config["workers"] = workers;

    const std::string json_text = divent::io::dump17(divent::io::rate_report_to_json(report));
    const std::string csv_text = divent::io::rate_report_csv(report);
    std::cout << json_text;
    manifest.outputs.push_back("stdout");
    if (!out_dir.empty()) {
        write_file(out_dir + "/report.json", json_text);
        write_file(out_dir + "/report.csv", csv_text);
        manifest.outputs.push_back(out_dir + "/report.json");
        manifest.outputs.push_back(out_dir + "/report.csv");
    }
    manifest.emit();
    return 0;
}

// ------------------------------------------------------------------ oracle

int cmd_oracle(const std::string& probs_text, std::uint64_t n,
               const std::string& estimator_name, const std::string& index_text,
               std::optional<double> center_flag, std::optional<double> scale_flag,
               const std::string& out_dir) {
    ManifestSink manifest;
    manifest.subcommand = "oracle";
    prepare_out_dir(manifest, out_dir);

    const std::vector<double> probs = parse_double_list(probs_text, "probability");
    const divent::EstimatorKind kind = divent::parse_estimator(estimator_name);
    const divent::IndexSpec index = divent::io::parse_index_text(index_text);

    const divent::AtomicLaw law = divent::exact_estimator_law(probs, n, kind, index);

    // Default standardization: center on the population value and scale by
    // the exact sd of the enumerated law.
    double center;
    if (center_flag) {
        center = *center_flag;
    } else {
        const divent::Distribution dist = divent::Distribution::finite(probs);
        const auto truth = divent::index_value(dist, index);
        center = truth ? *truth : 0.0;
    }
    const double scale = scale_flag ? *scale_flag : law.sd();
    if (scale_flag && !(*scale_flag > 0.0))
        throw std::invalid_argument("--scale must be positive");

    std::ostringstream body;
    body << divent::io::atomic_law_csv(law);
    char line[128];
    std::snprintf(line, sizeof line, "# mean,%.17g\n", law.mean());
    body << line;
    std::snprintf(line, sizeof line, "# sd,%.17g\n", law.sd());
    body << line;
    std::snprintf(line, sizeof line, "# center,%.17g\n", center);
    body << line;
    std::snprintf(line, sizeof line, "# scale,%.17g\n", scale);
    body << line;
    if (scale > 0.0) {
        std::snprintf(line, sizeof line, "# kolmogorov,%.17g\n",
                      divent::exact_kolmogorov(law, center, scale));
        body << line;
    } else {
        body << "# kolmogorov,unavailable (zero scale)\n";
    }

    manifest.resolved_config["probs"] = probs;
    manifest.resolved_config["n"] = n;
    manifest.resolved_config["estimator"] = divent::estimator_name(kind);
    manifest.resolved_config["index"] = divent::io::index_to_json(index);
    manifest.resolved_config["center"] = center;
    manifest.resolved_config["scale"] = scale;

    std::cout << body.str();
    manifest.outputs.push_back("stdout");
    if (!out_dir.empty()) {
        write_file(out_dir + "/law.csv", body.str());
        manifest.outputs.push_back(out_dir + "/law.csv");
    }
    manifest.emit();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"diversity-index and entropy estimation with CLT intervals"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("divent ") + kVersion);

    // estimate
    std::string in_path = "-", in_format = "tokens", est_index = "shannon";
    std::string est_name = "plugin", est_out_dir;
    double est_level = 0.95;
    bool est_csv = false;
    auto* est = app.add_subcommand("estimate", "estimate an index from observed data");
    est->add_option("--input", in_path, "input path, '-' for stdin")->capture_default_str();
    est->add_option("--format", in_format, "input format: tokens | csv")
        ->check(CLI::IsMember({"tokens", "csv"}))
        ->capture_default_str();
    est->add_option("--index", est_index, "index: shannon | power:MU,NU")
        ->capture_default_str();
    est->add_option("--estimator", est_name, "estimator: plugin | mm | jk")
        ->capture_default_str();
    est->add_option("--level", est_level, "confidence level in (0,1)")->capture_default_str();
    est->add_flag("--csv", est_csv, "print CSV instead of JSON");
    est->add_option("--out-dir", est_out_dir, "directory for estimate.json/csv + manifest");

    // theta
    std::string th_dist, th_index = "shannon", th_out_dir;
    auto* th = app.add_subcommand("theta", "population value, variance, rate exponents");
    th->add_option("--dist", th_dist, "distribution config: inline JSON, @file, or path")
        ->required();
    th->add_option("--index", th_index, "index: shannon | power:MU,NU")->capture_default_str();
    th->add_option("--out-dir", th_out_dir, "directory for theta.json + manifest");

    // conditions
    std::string co_dist, co_check = "shannon-plugin", co_index, co_k = "ln(n)";
    std::string co_grid = "100,1000,10000,100000,1000000", co_out_dir;
    double co_delta = 0.1;
    std::optional<double> co_epsilon, co_beta;
    auto* co = app.add_subcommand("conditions", "check hypothesis conditions on an n-grid");
    co->add_option("--dist", co_dist, "distribution config: inline JSON, @file, or path")
        ->required();
    co->add_option("--check", co_check,
                   "condition set: power-index | shannon-plugin | miller-madow | jackknife")
        ->capture_default_str();
    co->add_option("--delta", co_delta, "truncation exponent, in (0, 1/2)")
        ->capture_default_str();
    co->add_option("--epsilon", co_epsilon, "light-tail exponent for jackknife, in (1/2, 1)");
    co->add_option("--beta", co_beta, "smoothness exponent for power-index, in (0, 1]");
    co->add_option("--index", co_index, "derive --beta from a power index");
    co->add_option("--K", co_k, "truncation level: c*n^a, c*ln(n), or c*n^a*ln(n)")
        ->capture_default_str();
    co->add_option("--n-grid", co_grid, "comma-separated sample sizes")->capture_default_str();
    co->add_option("--out-dir", co_out_dir, "directory for conditions.json + manifest");

    // rate
    std::string ra_config, ra_out_dir;
    unsigned ra_workers = 1;
    std::optional<std::uint64_t> ra_seed;
    auto* ra = app.add_subcommand("rate", "Monte Carlo convergence-rate experiment");
    ra->add_option("--config", ra_config, "experiment config JSON (or a prior manifest)")
        ->required();
    ra->add_option("--workers", ra_workers, "worker threads")->capture_default_str();
    ra->add_option("--seed", ra_seed, "override master seed (also: DIVENT_SEED)");
    ra->add_option("--out-dir", ra_out_dir, "directory for report.json/csv + manifest");

    // oracle
    std::string or_probs, or_est = "plugin", or_index = "shannon", or_out_dir;
    std::uint64_t or_n = 0;
    std::optional<double> or_center, or_scale;
    auto* orc = app.add_subcommand("oracle", "exact small-sample law by enumeration");
    orc->add_option("--probs", or_probs, "comma-separated probabilities")->required();
    orc->add_option("--n", or_n, "sample size (enumeration bound: k <= 6, n <= 30)")
        ->required();
    orc->add_option("--estimator", or_est, "estimator: plugin | mm | jk")
        ->capture_default_str();
    orc->add_option("--index", or_index, "index: shannon | power:MU,NU")
        ->capture_default_str();
    orc->add_option("--center", or_center, "standardization center (default: population value)");
    orc->add_option("--scale", or_scale, "standardization scale (default: exact sd)");
    orc->add_option("--out-dir", or_out_dir, "directory for law.csv + manifest");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (est->parsed())
            return cmd_estimate(in_path, in_format, est_index, est_name, est_level, est_csv,
                                est_out_dir);
        if (th->parsed()) return cmd_theta(th_dist, th_index, th_out_dir);
        if (co->parsed())
            return cmd_conditions(co_dist, co_check, co_delta, co_epsilon, co_beta, co_index,
                                  co_k, co_grid, co_out_dir);
        if (ra->parsed()) return cmd_rate(ra_config, ra_workers, ra_seed, ra_out_dir);
        if (orc->parsed())
            return cmd_oracle(or_probs, or_n, or_est, or_index, or_center, or_scale,
                              or_out_dir);
    } catch (const divent::infeasible_error& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
