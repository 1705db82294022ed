#include "bqec/runner/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace bqec::runner {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// Strips a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

std::vector<std::string> split_array(const std::string& raw) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char c : raw) {
        if (c == '"') quoted = !quoted;
        if (c == ',' && !quoted) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty()) out.push_back(trim(cur));
    return out;
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

double parse_number(const std::string& s, const std::string& where) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("expected a number for " + where + ", got '" + s + "'");
    }
}

}  // namespace

TomlTable TomlTable::parse_string(const std::string& text) {
    TomlTable t;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": bad section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
        t.values_[section + "." + key] = val;
    }
    return t;
}

TomlTable TomlTable::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

bool TomlTable::has(const std::string& section, const std::string& key) const {
    return values_.count(section + "." + key) > 0;
}

const std::string& TomlTable::raw(const std::string& section, const std::string& key) const {
    auto it = values_.find(section + "." + key);
    if (it == values_.end()) throw ConfigError("missing config key [" + section + "] " + key);
    return it->second;
}

double TomlTable::number(const std::string& section, const std::string& key,
                         double fallback) const {
    if (!has(section, key)) return fallback;
    return parse_number(raw(section, key), section + "." + key);
}

double TomlTable::number(const std::string& section, const std::string& key) const {
    return parse_number(raw(section, key), section + "." + key);
}

std::string TomlTable::str(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
    if (!has(section, key)) return fallback;
    return unquote(raw(section, key));
}

bool TomlTable::boolean(const std::string& section, const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = raw(section, key);
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError("expected true/false for " + section + "." + key);
}

std::vector<double> TomlTable::numbers(const std::string& section, const std::string& key) const {
    const std::string& v = raw(section, key);
    std::vector<double> out;
    if (v.front() == '[') {
        if (v.back() != ']') throw ConfigError("unterminated array for " + section + "." + key);
        for (const auto& item : split_array(v.substr(1, v.size() - 2)))
            out.push_back(parse_number(item, section + "." + key));
    } else {
        out.push_back(parse_number(v, section + "." + key));
    }
    return out;
}

std::vector<std::string> TomlTable::strings(const std::string& section,
                                            const std::string& key) const {
    const std::string& v = raw(section, key);
    std::vector<std::string> out;
    if (v.front() == '[') {
        if (v.back() != ']') throw ConfigError("unterminated array for " + section + "." + key);
        for (const auto& item : split_array(v.substr(1, v.size() - 2))) out.push_back(unquote(item));
    } else {
        out.push_back(unquote(v));
    }
    return out;
}

std::string TomlTable::canonical() const {
    std::string out;
    for (const auto& [k, v] : values_) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string experiment_kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Rsb: return "rsb";
        case ExperimentKind::Gkp: return "gkp";
        case ExperimentKind::Twirl: return "twirl";
        case ExperimentKind::BreakEven: return "break-even";
    }
    return "?";
}

ExperimentKind experiment_kind_from_name(const std::string& name) {
    if (name == "rsb") return ExperimentKind::Rsb;
    if (name == "gkp") return ExperimentKind::Gkp;
    if (name == "twirl") return ExperimentKind::Twirl;
    if (name == "break-even") return ExperimentKind::BreakEven;
    throw ConfigError("unknown experiment kind: " + name);
}

SweepConfig SweepConfig::from_toml(const TomlTable& t) {
    SweepConfig c;
    c.kind = experiment_kind_from_name(t.str("sweep", "kind", "rsb"));
    c.out = t.str("sweep", "out", "results.csv");
    c.seed = std::uint64_t(t.number("sweep", "seed", 1));

    c.family = t.str("code", "family", "bin");
    c.order = int(t.number("code", "order", 2));
    if (t.has("code", "nbar")) c.nbar = t.numbers("code", "nbar");

    c.anc_family = t.str("ancilla", "family", "cat");
    c.anc_order = int(t.number("ancilla", "order", 1));
    c.anc_alpha = t.number("ancilla", "alpha", 10.0);
    c.anc_match_nbar = t.boolean("ancilla", "match_nbar", false);
    c.anc_scheme = t.str("ancilla", "scheme", "can");

    if (t.has("noise", "kappa_tau")) c.kappa_tau = t.numbers("noise", "kappa_tau");
    if (t.has("noise", "kappa_phi_tau")) c.kappa_phi_tau = t.numbers("noise", "kappa_phi_tau");
    c.kappa_ratio = t.number("noise", "kappa_ratio", 0.0);

    if (t.has("measurement", "schemes")) c.schemes = t.strings("measurement", "schemes");
    if (t.has("measurement", "eta")) c.eta = t.numbers("measurement", "eta");

    if (t.has("gkp", "delta")) c.delta = t.numbers("gkp", "delta");
    c.efficiency_model = t.str("gkp", "efficiency_model", "rescaled");

    c.dim = int(t.number("numerics", "dim", 0));
    c.anc_dim = int(t.number("numerics", "anc_dim", 0));
    c.bins = int(t.number("numerics", "bins", 512));
    c.grid_points = int(t.number("numerics", "grid_points", 1024));
    c.mc_samples = std::uint64_t(t.number("numerics", "mc_samples", 0));

    c.canonical_text = t.canonical();
    c.finalize();
    return c;
}

SweepConfig SweepConfig::from_file(const std::string& path) {
    return from_toml(TomlTable::parse_file(path));
}

void SweepConfig::finalize() {
    if (kappa_tau.empty()) throw ConfigError("noise.kappa_tau grid is empty");
    if (kappa_ratio > 0.0 && !kappa_phi_tau.empty())
        throw ConfigError("give either noise.kappa_phi_tau or noise.kappa_ratio, not both");
    if (kappa_phi_tau.empty() && kappa_ratio <= 0.0) kappa_phi_tau = kappa_tau;
    if (eta.empty()) throw ConfigError("measurement.eta grid is empty");
    for (double e : eta)
        if (e <= 0.0 || e > 1.0) throw ConfigError("measurement.eta values must be in (0,1]");
    if (kind == ExperimentKind::Rsb) {
        if (nbar.empty()) throw ConfigError("code.nbar grid is empty");
        if (schemes.empty()) throw ConfigError("measurement.schemes is empty");
        if (family != "cat" && family != "bin")
            throw ConfigError("code.family must be cat or bin for rsb sweeps");
        if (order < 1) throw ConfigError("code.order must be >= 1");
    }
    if (kind == ExperimentKind::Gkp || kind == ExperimentKind::Twirl) {
        if (delta.empty()) throw ConfigError("gkp.delta grid is empty");
        for (double d : delta)
            if (d <= 0.0) throw ConfigError("gkp.delta values must be > 0");
        if (efficiency_model != "rescaled" && efficiency_model != "amplified")
            throw ConfigError("gkp.efficiency_model must be rescaled or amplified");
    }
    if (bins < 8) throw ConfigError("numerics.bins must be >= 8");
    if (canonical_text.empty()) {
        std::ostringstream ss;
        ss << "kind=" << experiment_kind_name(kind) << "\nfamily=" << family
           << "\norder=" << order << "\nout=" << out << "\nseed=" << seed << "\n";
        canonical_text = ss.str();
    }
    hash = fnv1a(canonical_text);
}

}  // namespace bqec::runner
