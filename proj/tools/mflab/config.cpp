#include "config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "mflab/errors.hpp"
#include "mflab/numerics.hpp"

namespace mflab::cli {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return errno == 0 && end && *end == '\0';
}

bool parse_long(const std::string& s, long& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtol(s.c_str(), &end, 10);
    return errno == 0 && end && *end == '\0';
}

struct KeySpec {
    std::set<std::string> required;
    std::map<std::string, std::string> defaults;  // optional keys with defaults
    std::set<std::string> optional;               // optional, no default
};

// Universal keys shared by every subcommand.
const std::map<std::string, std::string> kUniversalDefaults = {
    {"system.kind", "torus-rotation"},
    {"system.field", "identity"},
    {"system.x0", "0"},
    {"run.seed", "1"},
    {"output.directory", "out"},
    {"output.formats", "csv,json"},
};

KeySpec key_spec(const std::string& sub) {
    KeySpec k;
    auto model = [&] {
        k.defaults["model.beta"] = "1";
        k.defaults["model.J"] = "1";
    };
    if (sub == "walk-dist") {
        k.required = {"run.n"};
    } else if (sub == "walk-mdp") {
        k.required = {"run.n_grid", "run.alpha_scaling", "run.z"};
    } else if (sub == "magnetization-dist") {
        k.required = {"run.n"};
        model();
    } else if (sub == "landscape") {
        model();
        k.defaults["run.s_grid"] = "-1:1:401";
        k.optional = {"run.n"};
    } else if (sub == "critical-beta") {
        k.defaults["model.J"] = "1";
    } else if (sub == "verify-mdp") {
        k.required = {"run.n_grid", "run.alpha_scaling", "run.z"};
        model();
        k.defaults["run.m"] = "0";
        k.optional = {"run.window"};
    } else if (sub == "scaling-check") {
        k.required = {"run.n_grid", "run.alpha_scaling"};
        model();
        k.defaults["run.s_grid"] = "-2:2:41";
        k.defaults["run.radius"] = "0.3";
        k.defaults["run.m"] = "0";
    } else if (sub == "hs-check") {
        k.required = {"run.n"};
        model();
        k.defaults["run.alpha_scaling"] = "1";
        k.defaults["run.m"] = "0";
        k.defaults["run.s_grid"] = "-1.5:1.5:301";
    } else if (sub == "clt-density") {
        model();
        k.defaults["run.s_grid"] = "-3:3:301";
        k.defaults["run.m"] = "0";
    } else {
        throw DomainError("unknown subcommand: " + sub);
    }
    return k;
}

}  // namespace

const std::string& ExperimentConfig::raw(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end())
        throw ConfigError("missing config key", {key + ": required but absent"});
    return it->second;
}

double ExperimentConfig::get_double(const std::string& key) const {
    double v;
    if (!parse_double(raw(key), v))
        throw ConfigError("bad config value", {key + ": not a number"});
    return v;
}

long ExperimentConfig::get_long(const std::string& key) const {
    long v;
    if (!parse_long(raw(key), v))
        throw ConfigError("bad config value", {key + ": not an integer"});
    return v;
}

unsigned long long ExperimentConfig::get_seed() const {
    errno = 0;
    char* end = nullptr;
    const std::string& s = raw("run.seed");
    unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (errno != 0 || !end || *end != '\0')
        throw ConfigError("bad config value", {"run.seed: not an unsigned integer"});
    return v;
}

std::vector<long> ExperimentConfig::get_n_grid() const {
    std::vector<long> grid;
    for (const std::string& part : split(raw("run.n_grid"), ',')) {
        long v;
        if (!parse_long(part, v))
            throw ConfigError("bad config value", {"run.n_grid: not an integer list"});
        grid.push_back(v);
    }
    return grid;
}

std::vector<double> ExperimentConfig::get_s_grid() const {
    const std::string& s = raw("run.s_grid");
    std::vector<double> grid;
    if (s.find(':') != std::string::npos) {
        std::vector<std::string> parts = split(s, ':');
        double lo, hi;
        long count;
        if (parts.size() != 3 || !parse_double(parts[0], lo) ||
            !parse_double(parts[1], hi) || !parse_long(parts[2], count) || count < 2)
            throw ConfigError("bad config value",
                              {"run.s_grid: expected lo:hi:count with count >= 2"});
        for (long i = 0; i < count; ++i)
            grid.push_back(lo + (hi - lo) * double(i) / double(count - 1));
        return grid;
    }
    for (const std::string& part : split(s, ',')) {
        double v;
        if (!parse_double(part, v))
            throw ConfigError("bad config value", {"run.s_grid: not a number list"});
        grid.push_back(v);
    }
    return grid;
}

namespace {

FieldFunction parse_field(const std::string& spec, std::vector<std::string>& errs) {
    if (spec == "identity") return FieldFunction::identity();
    if (spec.rfind("constant:", 0) == 0) {
        double p;
        if (!parse_double(spec.substr(9), p) || p < 0.0 || p > 1.0) {
            errs.push_back("system.field: constant:<p> needs p in [0,1]");
            return FieldFunction::constant(0.5);
        }
        return FieldFunction::constant(p);
    }
    if (spec.rfind("logistic-of:", 0) == 0) {
        // logistic-of:<a>,<b> applies the logistic function to g(y) = a + b y.
        std::vector<std::string> parts = split(spec.substr(12), ',');
        double a, b;
        if (parts.size() != 2 || !parse_double(parts[0], a) ||
            !parse_double(parts[1], b)) {
            errs.push_back("system.field: logistic-of:<a>,<b> needs two numbers");
            return FieldFunction::constant(0.5);
        }
        return FieldFunction::logistic_of(spec, [a, b](double y) { return a + b * y; });
    }
    errs.push_back("system.field: unknown field \"" + spec + "\"");
    return FieldFunction::constant(0.5);
}

}  // namespace

SystemDescriptor ExperimentConfig::build_system() const {
    std::vector<std::string> errs;
    const std::string& kind = raw("system.kind");
    SystemDescriptor sys = constant_field(0.5);
    if (kind == "torus-rotation") {
        double angle = get_double("system.alpha");
        FieldFunction field = parse_field(raw("system.field"), errs);
        if (errs.empty()) sys = torus_rotation(angle, field);
    } else if (kind == "constant-field") {
        const std::string& fs = raw("system.field");
        if (fs.rfind("constant:", 0) != 0) {
            errs.push_back("system.field: constant-field systems need constant:<p>");
        } else {
            double p;
            if (!parse_double(fs.substr(9), p) || p < 0.0 || p > 1.0)
                errs.push_back("system.field: constant:<p> needs p in [0,1]");
            else
                sys = constant_field(p);
        }
    } else {
        errs.push_back("system.kind: must be torus-rotation or constant-field");
    }
    if (!errs.empty()) throw ConfigError("invalid system block", errs);
    return sys;
}

double ExperimentConfig::x0() const { return get_double("system.x0"); }

double ExperimentConfig::beta_J() const {
    return get_double("model.beta") * get_double("model.J");
}

std::string ExperimentConfig::output_directory() const {
    if (const char* env = std::getenv("MFLAB_OUTDIR"); env && *env) return env;
    return raw("output.directory");
}

bool ExperimentConfig::wants_csv() const {
    for (const std::string& f : split(raw("output.formats"), ','))
        if (f == "csv") return true;
    return false;
}

ExperimentConfig resolve_config(const std::string& subcommand,
                                const std::string& config_path,
                                const std::vector<std::string>& overrides,
                                const std::string& out_flag) {
    KeySpec spec = key_spec(subcommand);
    std::vector<std::string> violations;

    ExperimentConfig cfg;
    cfg.subcommand = subcommand;
    for (const auto& [k, v] : kUniversalDefaults) cfg.values[k] = v;
    for (const auto& [k, v] : spec.defaults) cfg.values[k] = v;
    cfg.values["system.alpha"] = format_double(golden_rotation);

    auto apply = [&](const std::string& line, const std::string& origin) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') return;
        size_t eq = t.find('=');
        if (eq == std::string::npos) {
            violations.push_back(origin + ": expected KEY=VALUE, got \"" + t + "\"");
            return;
        }
        cfg.values[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    };

    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            violations.push_back("config file: cannot open " + config_path);
        } else {
            std::string line;
            while (std::getline(in, line)) apply(line, config_path);
        }
    }
    for (const std::string& ov : overrides) apply(ov, "--set");
    if (!out_flag.empty()) cfg.values["output.directory"] = out_flag;

    // Key inventory: everything present must be known, everything required
    // must be present.
    std::set<std::string> known;
    for (const auto& [k, v] : kUniversalDefaults) known.insert(k);
    known.insert("system.alpha");
    for (const auto& [k, v] : spec.defaults) known.insert(k);
    known.insert(spec.required.begin(), spec.required.end());
    known.insert(spec.optional.begin(), spec.optional.end());
    for (const auto& [k, v] : cfg.values)
        if (!known.count(k))
            violations.push_back(k + ": unknown key for subcommand " + subcommand);
    for (const std::string& k : spec.required)
        if (!cfg.values.count(k)) violations.push_back(k + ": required but absent");

    // Value-level checks for whatever is present.
    auto check_double = [&](const std::string& key, auto pred,
                            const std::string& what) {
        auto it = cfg.values.find(key);
        if (it == cfg.values.end()) return;
        double v;
        if (!parse_double(it->second, v))
            violations.push_back(key + ": not a number");
        else if (!pred(v))
            violations.push_back(key + ": " + what);
    };
    check_double("model.beta", [](double v) { return v > 0.0; }, "must be > 0");
    check_double("model.J", [](double v) { return v > 0.0; }, "must be > 0");
    check_double("system.alpha", [](double v) { return v > 0.0 && v < 1.0; },
                 "must lie in (0,1)");
    check_double("system.x0", [](double v) { return std::isfinite(v); },
                 "must be finite");
    check_double("run.z", [](double v) { return std::isfinite(v); }, "must be finite");
    check_double("run.alpha_scaling", [](double v) { return std::isfinite(v); },
                 "must be finite");
    check_double("run.window", [](double v) { return v > 0.0; }, "must be > 0");
    check_double("run.radius", [](double v) { return v > 0.0; }, "must be > 0");
    check_double("run.m", [](double v) { return std::isfinite(v); },
                 "must be finite");
    if (auto it = cfg.values.find("run.n"); it != cfg.values.end()) {
        long n;
        if (!parse_long(it->second, n))
            violations.push_back("run.n: not an integer");
        else if (n < 1)
            violations.push_back("run.n: must be >= 1");
    }
    if (auto it = cfg.values.find("run.n_grid"); it != cfg.values.end()) {
        bool ok = true;
        std::vector<std::string> parts = split(it->second, ',');
        if (parts.empty()) ok = false;
        for (const std::string& p : parts) {
            long n;
            if (!parse_long(p, n) || n < 1) ok = false;
        }
        if (!ok) violations.push_back("run.n_grid: must be a list of integers >= 1");
    }
    if (auto it = cfg.values.find("output.formats"); it != cfg.values.end()) {
        for (const std::string& f : split(it->second, ','))
            if (f != "csv" && f != "json")
                violations.push_back("output.formats: unknown format \"" + f + "\"");
    }
    if (cfg.values["system.kind"] != "torus-rotation" &&
        cfg.values["system.kind"] != "constant-field")
        violations.push_back("system.kind: must be torus-rotation or constant-field");

    if (!violations.empty())
        throw ConfigError("configuration rejected", violations);

    // Constant-field systems carry no rotation angle; drop it from the
    // resolved view so reports only echo meaningful keys.
    if (cfg.values["system.kind"] == "constant-field") cfg.values.erase("system.alpha");
    return cfg;
}

}  // namespace mflab::cli
