#include "adn/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "adn/errors.hpp"
#include "adn/validation.hpp"

namespace adn::cli {

using nlohmann::json;

namespace {

constexpr std::uint64_t kSetupStreamTag = 0xD1B54A32D192ED03ULL;

// Size limits checked before any simulation work starts.
constexpr std::size_t kMaxNodes = 5000;
constexpr std::size_t kMaxNodesDense = 400; // full model exponentiates n x n matrices
constexpr std::size_t kMaxSteps = 100'000'000;
constexpr double kMaxPathSteps = 1e12;

const std::set<std::string> kKnownKeys = {"n",     "m",        "dt",       "eps",        "k_max",
                                          "n_paths", "seed",   "model",    "activity",   "tie_break",
                                          "z0",    "fit_window", "notes", "results", "activity_source"};

template <typename T>
T get_unsigned(const json& j, const std::string& key, const std::string& path) {
    const json& v = j.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        throw ConfigError(path, "expected a non-negative integer");
    }
    return static_cast<T>(v.get<std::uint64_t>());
}

double get_real(const json& j, const std::string& key, const std::string& path) {
    const json& v = j.at(key);
    if (!v.is_number()) {
        throw ConfigError(path, "expected a number");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
        throw ConfigError(path, "expected a finite number");
    }
    return x;
}

std::vector<double> get_real_array(const json& j, const std::string& path) {
    if (!j.is_array()) {
        throw ConfigError(path, "expected an array of numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) {
            throw ConfigError(path + "[" + std::to_string(i) + "]", "expected a number");
        }
        out.push_back(j[i].get<double>());
    }
    return out;
}

TieBreakRule parse_tie_break(const json& j, std::size_t n) {
    if (j.is_string()) {
        if (j.get<std::string>() != "uniform") {
            throw ConfigError("tie_break", "expected \"uniform\" or an object with mode \"table\"");
        }
        return TieBreakRule::uniform();
    }
    if (!j.is_object() || !j.contains("mode") || !j.at("mode").is_string()) {
        throw ConfigError("tie_break.mode", "expected \"uniform\" or \"table\"");
    }
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "uniform") {
        return TieBreakRule::uniform();
    }
    if (mode != "table") {
        throw ConfigError("tie_break.mode", "expected \"uniform\" or \"table\"");
    }
    if (n > kMaxTableNodes) {
        throw ConfigError("tie_break.mode", "table mode supports at most 20 nodes");
    }
    if (!j.contains("table") || !j.at("table").is_array()) {
        throw ConfigError("tie_break.table", "expected an array of {set, weights} entries");
    }
    std::map<NodeSet, std::vector<double>> table;
    const json& entries = j.at("table");
    for (std::size_t e = 0; e < entries.size(); ++e) {
        const std::string path = "tie_break.table[" + std::to_string(e) + "]";
        const json& entry = entries[e];
        if (!entry.is_object() || !entry.contains("set") || !entry.contains("weights")) {
            throw ConfigError(path, "expected {\"set\": [...], \"weights\": [...]}");
        }
        const std::vector<double> ids = get_real_array(entry.at("set"), path + ".set");
        const std::vector<double> weights = get_real_array(entry.at("weights"), path + ".weights");
        if (ids.size() != weights.size()) {
            throw ConfigError(path, "set and weights must have the same length");
        }
        std::vector<std::pair<NodeId, double>> members;
        NodeSet mask = 0;
        for (std::size_t k = 0; k < ids.size(); ++k) {
            const double id = ids[k];
            if (id != std::floor(id) || id < 1 || id > static_cast<double>(n)) {
                throw ConfigError(path + ".set[" + std::to_string(k) + "]", "node ids must be integers in 1..n");
            }
            const auto node = static_cast<NodeId>(id) - 1;
            if (mask >> node & 1U) {
                throw ConfigError(path + ".set", "duplicate node id");
            }
            mask |= NodeSet{1} << node;
            members.emplace_back(node, weights[k]);
        }
        std::sort(members.begin(), members.end());
        std::vector<double> ordered;
        for (const auto& [node, w] : members) {
            ordered.push_back(w);
        }
        if (table.count(mask)) {
            throw ConfigError(path + ".set", "set listed twice");
        }
        table.emplace(mask, std::move(ordered));
    }
    try {
        return TieBreakRule::table(std::move(table));
    } catch (const ParameterError& e) {
        throw ConfigError("tie_break.table", e.what());
    }
}

std::string csv_header_line(std::initializer_list<std::string_view> cols) {
    std::string out;
    for (auto c : cols) {
        if (!out.empty()) {
            out += ',';
        }
        out += c;
    }
    return out + '\n';
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write " + path.string());
    }
    f << content;
}

json bound_to_json(const DecayBound& b) {
    return json{{"rate", b.rate}, {"lambda", b.lambda}, {"sum_w", b.sum_w}, {"weights", b.weights}};
}

void check_feasible(const ExperimentConfig& cfg) {
    if (cfg.n > kMaxNodes) {
        throw ConfigError("n", "simulation supports at most " + std::to_string(kMaxNodes) + " nodes");
    }
    if (cfg.model == ModelKind::full && cfg.n > kMaxNodesDense) {
        throw ConfigError("n", "the full model supports at most " + std::to_string(kMaxNodesDense) +
                                   " nodes (dense exponential per step)");
    }
    if (cfg.k_max > kMaxSteps) {
        throw ConfigError("k_max", "at most " + std::to_string(kMaxSteps) + " steps");
    }
    if (static_cast<double>(cfg.k_max) * static_cast<double>(cfg.n_paths) > kMaxPathSteps) {
        throw ConfigError("n_paths", "k_max * n_paths exceeds 1e12 simulated steps");
    }
}

} // namespace

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) {
        throw ConfigError("<root>", "expected a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        if (!kKnownKeys.count(key)) {
            throw ConfigError(key, "unknown field");
        }
    }
    for (const char* key : {"n", "m", "dt", "activity"}) {
        if (!j.contains(key)) {
            throw ConfigError(key, "required field is missing");
        }
    }
    ExperimentConfig cfg;
    cfg.n = get_unsigned<std::size_t>(j, "n", "n");
    cfg.m = get_unsigned<std::size_t>(j, "m", "m");
    if (cfg.n < 2) {
        throw ConfigError("n", "need at least 2 nodes");
    }
    if (cfg.m < 1 || cfg.m > cfg.n - 1) {
        throw ConfigError("m", "need 1 <= m <= n-1");
    }
    cfg.dt = get_real(j, "dt", "dt");
    if (cfg.dt < 0.0) {
        throw ConfigError("dt", "must be non-negative");
    }
    if (j.contains("eps")) {
        cfg.eps = get_real(j, "eps", "eps");
        if (!(*cfg.eps > 0.0)) {
            throw ConfigError("eps", "must be positive");
        }
    }
    if (j.contains("k_max")) {
        cfg.k_max = get_unsigned<std::size_t>(j, "k_max", "k_max");
        if (cfg.k_max < 1) {
            throw ConfigError("k_max", "must be at least 1");
        }
    }
    if (j.contains("n_paths")) {
        cfg.n_paths = get_unsigned<std::uint64_t>(j, "n_paths", "n_paths");
        if (cfg.n_paths < 1) {
            throw ConfigError("n_paths", "must be at least 1");
        }
    }
    if (j.contains("seed")) {
        cfg.seed = get_unsigned<std::uint64_t>(j, "seed", "seed");
    }
    if (j.contains("model")) {
        if (!j.at("model").is_string()) {
            throw ConfigError("model", "expected a string");
        }
        try {
            cfg.model = parse_model_kind(j.at("model").get<std::string>());
        } catch (const ParameterError& e) {
            throw ConfigError("model", e.what());
        }
    }

    const json& act = j.at("activity");
    if (!act.is_object() || !act.contains("mode") || !act.at("mode").is_string()) {
        throw ConfigError("activity.mode", "expected \"explicit\" or \"uniform_draw\"");
    }
    const std::string mode = act.at("mode").get<std::string>();
    if (mode == "explicit") {
        if (!act.contains("values")) {
            throw ConfigError("activity.values", "required for mode \"explicit\"");
        }
        cfg.activity.mode = ActivitySpec::Mode::explicit_values;
        cfg.activity.values = get_real_array(act.at("values"), "activity.values");
        if (cfg.activity.values.size() != cfg.n) {
            throw ConfigError("activity.values", "expected n = " + std::to_string(cfg.n) + " values");
        }
        for (std::size_t i = 0; i < cfg.n; ++i) {
            const double a = cfg.activity.values[i];
            if (!(a > 0.0 && a <= 1.0)) {
                throw ConfigError("activity.values[" + std::to_string(i) + "]", "activity rates must lie in (0, 1]");
            }
        }
    } else if (mode == "uniform_draw") {
        if (!act.contains("upper")) {
            throw ConfigError("activity.upper", "required for mode \"uniform_draw\"");
        }
        cfg.activity.mode = ActivitySpec::Mode::uniform_draw;
        cfg.activity.upper = get_real(act, "upper", "activity.upper");
        if (!(cfg.activity.upper > 0.0 && cfg.activity.upper <= 1.0)) {
            throw ConfigError("activity.upper", "must lie in (0, 1]");
        }
    } else {
        throw ConfigError("activity.mode", "expected \"explicit\" or \"uniform_draw\"");
    }

    if (j.contains("tie_break")) {
        cfg.tie_break = parse_tie_break(j.at("tie_break"), cfg.n);
    }
    if (j.contains("z0")) {
        cfg.z0 = get_real_array(j.at("z0"), "z0");
        if (cfg.z0->size() != cfg.n) {
            throw ConfigError("z0", "expected n = " + std::to_string(cfg.n) + " values");
        }
        for (std::size_t i = 0; i < cfg.n; ++i) {
            if (!std::isfinite((*cfg.z0)[i])) {
                throw ConfigError("z0[" + std::to_string(i) + "]", "must be finite");
            }
        }
    }
    if (j.contains("fit_window")) {
        const auto w = get_real_array(j.at("fit_window"), "fit_window");
        if (w.size() != 2 || !(w[0] >= 0.0 && w[0] < w[1] && w[1] <= 1.0)) {
            throw ConfigError("fit_window", "expected [lo, hi] with 0 <= lo < hi <= 1");
        }
        cfg.fit_window = FitWindow{w[0], w[1]};
    }
    if (j.contains("notes")) {
        if (!j.at("notes").is_string()) {
            throw ConfigError("notes", "expected a string");
        }
        cfg.notes = j.at("notes").get<std::string>();
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) {
        throw ConfigError("--config", "cannot open " + path.string());
    }
    json j;
    try {
        f >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(j);
}

ResolvedRun resolve(const ExperimentConfig& cfg) {
    Rng setup(cfg.seed ^ kSetupStreamTag);
    ResolvedRun run;
    run.params.n = cfg.n;
    run.params.m = cfg.m;
    run.params.dt = cfg.dt;
    if (cfg.activity.mode == ActivitySpec::Mode::explicit_values) {
        run.params.activity = cfg.activity.values;
    } else {
        run.params.activity.resize(cfg.n);
        for (double& a : run.params.activity) {
            a = (1.0 - setup.uniform01()) * cfg.activity.upper;
        }
    }
    if (cfg.z0) {
        run.z0 = *cfg.z0;
    } else {
        run.z0.resize(cfg.n);
        for (double& z : run.z0) {
            z = setup.uniform(-1.0, 1.0);
        }
    }
    return run;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string survival_csv(const SurvivalCurve& curve) {
    std::string out = csv_header_line({"K", "prob", "n_paths"});
    for (std::size_t k = 0; k < curve.probs.size(); ++k) {
        out += std::to_string(k);
        out += ',';
        out += format_double(curve.probs[k]);
        out += ',';
        out += std::to_string(curve.paths);
        out += '\n';
    }
    return out;
}

json tie_break_to_json(const TieBreakRule& rule) {
    if (rule.is_uniform()) {
        return "uniform";
    }
    json table = json::array();
    for (const auto& [mask, weights] : rule.entries()) {
        json ids = json::array();
        for (NodeId i = 0; i < kMaxTableNodes; ++i) {
            if (mask >> i & 1U) {
                ids.push_back(i + 1);
            }
        }
        table.push_back(json{{"set", ids}, {"weights", weights}});
    }
    return json{{"mode", "table"}, {"table", table}};
}

unsigned resolve_threads(std::optional<unsigned> flag) {
    if (flag) {
        return std::max(1u, *flag);
    }
    if (const char* env = std::getenv("ADN_THREADS")) {
        unsigned value = 0;
        const std::string_view s(env);
        const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
        if (res.ec == std::errc() && res.ptr == s.data() + s.size() && value > 0) {
            return value;
        }
        throw ConfigError("ADN_THREADS", "expected a positive integer");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

int cmd_gamma(BoundKind kind, const ExperimentConfig& cfg, const std::filesystem::path& out_dir, std::ostream& out) {
    const ResolvedRun run = resolve(cfg);
    DecayBound bound;
    try {
        bound = kind == BoundKind::sparse ? gamma_sp(run.params) : gamma_fs(run.params, cfg.tie_break);
    } catch (const ParameterError& e) {
        throw ConfigError(kind == BoundKind::sparse ? "activity" : "tie_break", e.what());
    }
    const std::string name = kind == BoundKind::sparse ? "gamma_sp" : "gamma_fs";
    const std::string weight_name = kind == BoundKind::sparse ? "sum_a" : "sum_b";
    out << name << " = " << format_double(bound.rate) << '\n'
        << weight_name << " = " << format_double(bound.sum_w) << '\n'
        << "lambda_n-1 = " << format_double(bound.lambda) << '\n';

    std::string csv = csv_header_line({"bound", "n", "m", "dt", "sum_w", "lambda", "rate"});
    csv += name + ',' + std::to_string(cfg.n) + ',' + std::to_string(cfg.m) + ',' + format_double(cfg.dt) + ',' +
           format_double(bound.sum_w) + ',' + format_double(bound.lambda) + ',' + format_double(bound.rate) + '\n';
    write_file(out_dir / (name + ".csv"), csv);
    return kSuccess;
}

int cmd_simulate(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, unsigned threads,
                 std::ostream& out) {
    if (!cfg.eps) {
        throw ConfigError("eps", "required field is missing");
    }
    check_feasible(cfg);
    const ResolvedRun run = resolve(cfg);
    try {
        if (cfg.model == ModelKind::sparse) {
            run.params.validate_sparse();
        } else {
            run.params.validate();
        }
    } catch (const ParameterError& e) {
        throw ConfigError("activity", e.what());
    }
    if (!(cfg.dt > 0.0)) {
        throw ConfigError("dt", "simulation needs dt > 0");
    }

    SimulationOptions opts;
    opts.k_max = cfg.k_max;
    opts.n_paths = cfg.n_paths;
    opts.eps = *cfg.eps;
    opts.seed = cfg.seed;
    opts.threads = threads;
    SurvivalCurve curve = run_paths(run.params, cfg.model, cfg.tie_break, run.z0, opts);

    const FitWindow window = cfg.fit_window.value_or(default_fit_window(cfg.n_paths));
    json results;
    try {
        const DecayFit fit = fit_decay_rate(curve, window);
        curve.fitted_rate = fit.rate;
        results["fitted_rate"] = fit.rate;
        results["r_squared"] = fit.r_squared;
        results["fit_points"] = fit.points;
        results["fit_range"] = {fit.first_k, fit.last_k};
        out << "fitted decay rate = " << format_double(fit.rate) << " (R^2 = " << format_double(fit.r_squared)
            << ", " << fit.points << " points)\n";
    } catch (const ParameterError& e) {
        results["fitted_rate"] = nullptr;
        results["fit_error"] = e.what();
        out << "no decay fit: " << e.what() << '\n';
    }
    if (run.params.activity_sum() <= 1.0) {
        const DecayBound sp = gamma_sp(run.params);
        results["gamma_sp"] = bound_to_json(sp);
        out << "gamma_sp = " << format_double(sp.rate) << '\n';
    }
    const DecayBound fs = gamma_fs(run.params, cfg.tie_break);
    results["gamma_fs"] = bound_to_json(fs);
    out << "gamma_fs = " << format_double(fs.rate) << '\n';

    json manifest;
    manifest["n"] = cfg.n;
    manifest["m"] = cfg.m;
    manifest["dt"] = cfg.dt;
    manifest["eps"] = *cfg.eps;
    manifest["k_max"] = cfg.k_max;
    manifest["n_paths"] = cfg.n_paths;
    manifest["seed"] = cfg.seed;
    manifest["model"] = std::string(to_string(cfg.model));
    manifest["activity"] = {{"mode", "explicit"}, {"values", run.params.activity}};
    manifest["activity_source"] = cfg.activity.mode == ActivitySpec::Mode::uniform_draw
                                      ? json{{"mode", "uniform_draw"}, {"upper", cfg.activity.upper}}
                                      : json{{"mode", "explicit"}};
    manifest["tie_break"] = tie_break_to_json(cfg.tie_break);
    manifest["z0"] = run.z0;
    manifest["fit_window"] = {window.lo, window.hi};
    if (!cfg.notes.empty()) {
        manifest["notes"] = cfg.notes;
    }
    manifest["results"] = results;

    write_file(out_dir / "survival.csv", survival_csv(curve));
    write_file(out_dir / "manifest.json", manifest.dump(2) + '\n');
    out << "wrote " << (out_dir / "survival.csv").string() << " and " << (out_dir / "manifest.json").string()
        << '\n';
    return kSuccess;
}

int cmd_validate(const ValidateOptions& opts, const std::filesystem::path& out_dir, std::ostream& out) {
    ValidationOptions vopts;
    vopts.mi_perturbation = opts.mi_perturbation;
    if (opts.config) {
        ResolvedRun run = resolve(*opts.config);
        try {
            run.params.validate();
        } catch (const ParameterError& e) {
            throw ConfigError("activity", e.what());
        }
        vopts.params = run.params;
        vopts.rule = opts.config->tie_break;
    }
    const ValidationReport report = run_validation_suite(vopts);

    std::ostringstream text;
    for (const CheckResult& c : report.checks) {
        switch (c.status) {
        case CheckStatus::pass:
            text << "PASS  " << c.name << "  max_err=" << std::setprecision(3) << c.max_error
                 << " tol=" << c.tolerance << '\n';
            break;
        case CheckStatus::fail:
            text << "FAIL  " << c.name << "  max_err=" << std::setprecision(3) << c.max_error
                 << " tol=" << c.tolerance << "  " << c.detail << '\n';
            break;
        case CheckStatus::refused:
            text << "refused: size  " << c.name << "  (" << c.detail << ")\n";
            break;
        }
    }
    text << (report.passed() ? "all checks passed\n" : "validation breach\n");
    out << text.str();

    std::string csv = csv_header_line({"T", "lambda_full", "lambda_fastswitch", "gap", "holds"});
    for (const auto& row : report.inequality_rows) {
        csv += format_double(row.T) + ',' + format_double(row.lambda_full) + ',' +
               format_double(row.lambda_fastswitch) + ',' + format_double(row.gap) + ',' +
               (row.holds ? "1" : "0") + '\n';
    }
    write_file(out_dir / "validate_report.txt", text.str());
    write_file(out_dir / "inequality_gaps.csv", csv);
    return report.passed() ? kSuccess : kValidationBreach;
}

int cmd_count_snapshots(std::size_t n, std::size_t m, std::ostream& out) {
    try {
        out << snapshot_count(n, m) << '\n';
    } catch (const ParameterError& e) {
        throw ConfigError("m", e.what());
    }
    return kSuccess;
}

} // namespace adn::cli
