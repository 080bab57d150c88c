#include "fracdrift/config.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "fracdrift/format.hpp"

namespace fracdrift {

namespace {

std::string name_of(const FieldSpec& f) { return f.section.empty() ? f.key : f.section + "." + f.key; }

const FieldSpec* find_spec(const std::string& section, const std::string& key) {
    for (const auto& f : config_schema())
        if (f.section == section && f.key == key) return &f;
    return nullptr;
}

const FieldSpec* find_spec(const std::string& name) {
    for (const auto& f : config_schema())
        if (name_of(f) == name) return &f;
    return nullptr;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string join(const std::vector<std::string>& v, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
    return out;
}

bool parse_long(const std::string& text, long& out) {
    const char* end = text.data() + text.size();
    auto [p, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc() && p == end && !text.empty();
}

bool parse_double(const std::string& text, double& out) {
    const char* end = text.data() + text.size();
    auto [p, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc() && p == end && !text.empty();
}

// Converts the text of one value; returns an error message or an empty string.
std::string convert(const FieldSpec& f, const std::string& text, FieldValue& out) {
    switch (f.type) {
        case FieldType::integer: {
            long v = 0;
            if (!parse_long(text, v)) return name_of(f) + " expects an integer, got '" + text + "'";
            out = v;
            return "";
        }
        case FieldType::real: {
            double v = 0.0;
            if (!parse_double(text, v)) return name_of(f) + " expects a number, got '" + text + "'";
            out = v;
            return "";
        }
        case FieldType::real_list: {
            std::vector<double> v;
            std::stringstream ss(text);
            std::string item;
            while (std::getline(ss, item, ',')) {
                double x = 0.0;
                if (!parse_double(trim(item), x))
                    return name_of(f) + " expects a comma-separated list of numbers, got '" + text + "'";
                v.push_back(x);
            }
            if (v.empty()) return name_of(f) + " expects a non-empty list";
            out = std::move(v);
            return "";
        }
        case FieldType::word:
            if (text.empty()) return name_of(f) + " expects a value";
            if (!f.choices.empty() && std::find(f.choices.begin(), f.choices.end(), text) == f.choices.end())
                return name_of(f) + " expects one of " + join(f.choices, "|") + ", got '" + text + "'";
            out = text;
            return "";
    }
    return "";
}

std::vector<std::string> required_keys(const RunConfig& cfg) {
    std::vector<std::string> req{"command", "params.N", "params.s"};
    if (!cfg.has("command")) return req;
    const std::string cmd = cfg.command();
    const bool needs_beta = cmd == "classify" || cmd == "thresholds" || cmd == "verify-parabolic" ||
                            cmd == "verify-elliptic" || cmd == "cutoff-probe" ||
                            (cmd == "fraclap-eval" && cfg.get_word("scenario.profile") != "getoor");
    if (needs_beta) req.push_back("params.beta");
    return req;
}

FieldValue default_of(const FieldSpec& f) {
    FieldValue v;
    const std::string err = convert(f, f.default_text, v);
    if (!err.empty()) throw ConfigError("bad schema default: " + err);
    return v;
}

const FieldValue& lookup(const RunConfig& cfg, const std::string& name, FieldValue& scratch) {
    auto it = cfg.values.find(name);
    if (it != cfg.values.end()) return it->second;
    const FieldSpec* f = find_spec(name);
    if (!f) throw ConfigError("unknown key " + name);
    if (f->default_text.empty()) throw ConfigError("missing required key " + name);
    scratch = default_of(*f);
    return scratch;
}

}  // namespace

const std::vector<std::string>& config_commands() {
    static const std::vector<std::string> c{"classify",     "thresholds",   "verify-parabolic",
                                            "verify-elliptic", "verify-barrier", "cutoff-probe",
                                            "fraclap-eval", "simulate",     "influence"};
    return c;
}

const std::vector<FieldSpec>& config_schema() {
    using T = FieldType;
    static const std::vector<FieldSpec> schema{
        {"", "command", T::word, config_commands(), "", "operation to run"},
        {"", "seed", T::integer, {}, "0", "seed recorded in the report; overridden by --seed"},

        {"params", "N", T::integer, {}, "", "space dimension"},
        {"params", "s", T::real, {}, "", "fractional order, in (0,1)"},
        {"params", "alpha", T::real, {}, "0", "density lower-bound exponent"},
        {"params", "C0", T::real, {}, "1", "density lower-bound constant"},
        {"params", "sigma", T::real, {}, "0", "drift growth exponent"},
        {"params", "K", T::real, {}, "1", "drift growth constant"},
        {"params", "p", T::real, {}, "1", "integrability exponent (elliptic)"},
        {"params", "c0", T::real, {}, "0", "lower bound of the zero-order coefficient"},
        {"params", "beta", T::real, {}, "", "weight exponent"},
        {"params", "eps", T::real, {}, "0.1", "slack in the asymptotic bounds"},
        {"params", "lambda", T::real, {}, "", "decay rate to certify (default: the computed threshold)"},

        {"scenario", "density", T::word, {"inverse_poly", "constant"}, "inverse_poly",
         "density family; inverse_poly uses params.alpha and params.C0, constant uses params.C0"},
        {"scenario", "alpha_bar", T::real, {}, "", "density upper-bound exponent (default: params.alpha)"},
        {"scenario", "drift", T::word, {"radial_power", "envelope", "zero"}, "radial_power",
         "drift family; envelope is the worst case allowed by (sigma, K)"},
        {"scenario", "drift_sigma", T::real, {}, "", "drift exponent (default: params.sigma)"},
        {"scenario", "drift_K", T::real, {}, "", "drift constant (default: params.K)"},
        {"scenario", "smoothing", T::real, {}, "",
         "radial_power smoothing length at the origin (default: 0, or the grid spacing when simulating)"},
        {"scenario", "exterior", T::word, {"constant", "linear", "zero"}, "constant",
         "exterior data g(t): constant gamma, linear gamma*t, or zero"},
        {"scenario", "gamma", T::real, {}, "1", "exterior data scale"},
        {"scenario", "exterior2", T::word, {"constant", "linear", "zero"}, "zero",
         "second exterior data for influence"},
        {"scenario", "gamma2", T::real, {}, "1", "second exterior data scale"},
        {"scenario", "mode", T::word, {"parabolic", "elliptic"}, "parabolic", "simulate: time-dependent or stationary"},
        {"scenario", "c", T::real, {}, "0", "simulate: zero-order coefficient of the stationary problem"},
        {"scenario", "initial", T::word, {"zero", "gaussian"}, "zero", "simulate: initial data"},
        {"scenario", "L", T::real_list, {}, "10", "half-widths of the truncated domain (influence uses all)"},
        {"scenario", "M", T::integer, {}, "", "odd node count (default: from h0)"},
        {"scenario", "h0", T::real, {}, "0.05", "largest grid spacing"},
        {"scenario", "T", T::real, {}, "1", "final time"},
        {"scenario", "dt", T::real, {}, "0.01", "time step"},
        {"scenario", "probe", T::real, {}, "5", "influence: half-width of the observation window"},
        {"scenario", "R0", T::real, {}, "1", "verify-barrier: gluing radius; fraclap-eval: Getoor radius"},
        {"scenario", "R_values", T::real_list, {}, "10, 20, 40, 80", "cutoff-probe radii"},
        {"scenario", "radii", T::real_list, {}, "",
         "sample radii (default: 40 log-spaced on [0.1, 1000]; fraclap-eval 0.5, 1, 2)"},
        {"scenario", "times", T::real_list, {}, "", "sample times (default: 10 on [0, 1])"},
        {"scenario", "profile", T::word, {"psi_beta", "power_law", "getoor"}, "psi_beta", "fraclap-eval profile"},
        {"scenario", "v_exponent", T::real, {}, "0.5", "cutoff-probe: test function (1+r^2)^(-v_exponent/2)"},

        {"output", "dir", T::word, {}, ".", "output directory; overridden by --out"},
        {"output", "prefix", T::word, {}, "", "file name prefix (default: the command)"},
    };
    return schema;
}

const std::string& RunConfig::command() const {
    auto it = values.find("command");
    if (it == values.end()) throw ConfigError("missing required key command");
    return std::get<std::string>(it->second);
}

long RunConfig::get_int(const std::string& name) const {
    FieldValue scratch;
    return std::get<long>(lookup(*this, name, scratch));
}

double RunConfig::get_real(const std::string& name) const {
    FieldValue scratch;
    return std::get<double>(lookup(*this, name, scratch));
}

std::vector<double> RunConfig::get_list(const std::string& name) const {
    FieldValue scratch;
    return std::get<std::vector<double>>(lookup(*this, name, scratch));
}

std::string RunConfig::get_word(const std::string& name) const {
    FieldValue scratch;
    return std::get<std::string>(lookup(*this, name, scratch));
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::map<std::string, int> first_line;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    auto fail = [&](const std::string& msg) { throw ConfigError("line " + std::to_string(line_no) + ": " + msg); };

    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "params" && section != "scenario" && section != "output")
                fail("unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected key = value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const FieldSpec* f = find_spec(section, key);
        if (!f) fail("unknown key '" + key + "'" + (section.empty() ? "" : " in [" + section + "]"));
        const std::string name = name_of(*f);
        if (auto it = first_line.find(name); it != first_line.end())
            fail("duplicate key '" + name + "' (first set on line " + std::to_string(it->second) + ")");
        FieldValue v;
        if (const std::string err = convert(*f, value, v); !err.empty()) fail(err);
        cfg.values[name] = std::move(v);
        first_line[name] = line_no;
    }

    std::vector<std::string> missing;
    for (const auto& k : required_keys(cfg))
        if (!cfg.has(k)) missing.push_back(k);
    if (!missing.empty()) throw ConfigError("missing required keys: " + join(missing, ", "));
    return cfg;
}

std::string serialize_config(const RunConfig& config) {
    std::ostringstream out;
    std::string current;
    for (const auto& f : config_schema()) {
        auto it = config.values.find(name_of(f));
        if (it == config.values.end()) continue;
        if (f.section != current) {
            out << "\n[" << f.section << "]\n";
            current = f.section;
        }
        out << f.key << " = ";
        std::visit(
            [&](const auto& v) {
                using V = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<V, double>) {
                    out << fmt17(v);
                } else if constexpr (std::is_same_v<V, std::vector<double>>) {
                    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << fmt17(v[i]);
                } else {
                    out << v;
                }
            },
            it->second);
        out << "\n";
    }
    return out.str();
}

std::string config_reference() {
    std::ostringstream out;
    std::string current = "-";
    for (const auto& f : config_schema()) {
        if (f.section != current) {
            out << (f.section.empty() ? "(top level)" : "[" + f.section + "]") << "\n";
            current = f.section;
        }
        std::string type;
        switch (f.type) {
            case FieldType::integer: type = "int"; break;
            case FieldType::real: type = "number"; break;
            case FieldType::real_list: type = "list"; break;
            case FieldType::word: type = f.choices.empty() ? "text" : join(f.choices, "|"); break;
        }
        out << "  " << f.key << " (" << type << ")";
        if (!f.default_text.empty()) out << " = " << f.default_text;
        out << "  " << f.help << "\n";
    }
    return out.str();
}

}  // namespace fracdrift
