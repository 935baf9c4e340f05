#pragma once

#include <cctype>
#include <charconv>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qiopa/constants.hpp"
#include "qiopa/detection.hpp"
#include "qiopa/errors.hpp"
#include "qiopa/params.hpp"

namespace qiopa {

/// One swept variable of a parameter sweep.
struct AxisSpec {
    std::string name;
    double min{};
    double max{};
    int steps{};
    bool log_scale{};

    bool operator==(const AxisSpec&) const = default;
};

/// A fully resolved sweep request: base operating point, optional axes,
/// evaluation frequency and requested observables.
struct SweepSpec {
    PhysicalParams base;
    ScenarioParams scenario;
    double omega_eval{};
    std::vector<AxisSpec> axes;
    std::vector<std::string> outputs;

    bool operator==(const SweepSpec&) const = default;
};

inline const std::vector<std::string>& axis_vocabulary() {
    static const std::vector<std::string> v = {"G",   "theta", "omega",   "M",      "eta",
                                               "n_B", "P_w",   "P_o",     "kappa_w", "kappa_o"};
    return v;
}

inline const std::vector<std::string>& output_vocabulary() {
    static const std::vector<std::string> v = {"stability", "E_N",  "n(o|w)",  "n(w|o)",
                                               "SNR",       "P",    "SNR_coh", "P_coh"};
    return v;
}

/// Baseline operating point used when a config key is absent: 30 mK,
/// 1064 nm, omega_m/2pi = 10 MHz, Q = 3e4, omega_w/2pi = 10 GHz,
/// red/blue sideband detunings, kappa_w = 0.24 omega_m,
/// kappa_o = 0.2 omega_m, P_o = 10 P_w = 10 mW; scenario eta = 0.07,
/// M = 1e6, n_B = 610; evaluation frequency omega_m.
inline SweepSpec default_spec() {
    SweepSpec s;
    PhysicalParams& p = s.base;
    p.omega_m = constants::two_pi * 1e7;
    p.omega_w = constants::two_pi * 1e10;
    p.lambda_o = 1064e-9;
    p.Q_m = 3e4;
    p.kappa_w = 0.24 * p.omega_m;
    p.kappa_o = 0.2 * p.omega_m;
    p.delta_w = -p.omega_m;
    p.delta_o = p.omega_m;
    p.g_w_bare = constants::two_pi * 0.327;
    p.g_o_bare = constants::two_pi * 115.512;
    p.P_w = 1e-3;
    p.P_o = 10e-3;
    p.G = 0.0;
    p.theta = 0.0;
    p.T = 0.030;
    s.scenario = ScenarioParams{0.07, 1e6, 610.0};
    s.omega_eval = p.omega_m;
    s.outputs = {"stability"};
    return s;
}

namespace detail {

struct RawEntry {
    std::string value;
    int line{};
};

inline std::string trim(std::string_view sv) {
    std::size_t b = 0;
    std::size_t e = sv.size();
    while (b < e && std::isspace(static_cast<unsigned char>(sv[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(sv[e - 1]))) --e;
    return std::string(sv.substr(b, e - b));
}

/// Parse a single value token: optional sign, optional number, optional
/// suffix.  Suffixes convert to internal SI units; ordinary frequencies
/// convert to angular (x 2 pi).  Symbolic suffixes multiply by already
/// resolved parameters.
inline double parse_value_token(const std::string& token, int line,
                                const std::map<std::string, double>& symbols) {
    std::string t = trim(token);
    if (t.empty()) throw ConfigError("line " + std::to_string(line) + ": empty value");

    double sign = 1.0;
    std::size_t pos = 0;
    if (t[0] == '+' || t[0] == '-') {
        sign = (t[0] == '-') ? -1.0 : 1.0;
        pos = 1;
    }
    std::size_t num_end = pos;
    bool seen_digit = false;
    bool seen_dot = false;
    while (num_end < t.size()) {
        const char c = t[num_end];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            seen_digit = true;
            ++num_end;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
            ++num_end;
        } else if ((c == 'e' || c == 'E') && seen_digit && num_end + 1 < t.size() &&
                   (std::isdigit(static_cast<unsigned char>(t[num_end + 1])) ||
                    ((t[num_end + 1] == '+' || t[num_end + 1] == '-') && num_end + 2 < t.size() &&
                     std::isdigit(static_cast<unsigned char>(t[num_end + 2]))))) {
            num_end += 2; // exponent marker plus sign or first digit
            while (num_end < t.size() && std::isdigit(static_cast<unsigned char>(t[num_end])))
                ++num_end;
        } else {
            break;
        }
    }
    double magnitude = 1.0;
    if (seen_digit) {
        const std::string num = t.substr(pos, num_end - pos);
        try {
            magnitude = std::stod(num);
        } catch (const std::exception&) {
            throw ConfigError("line " + std::to_string(line) + ": unparsable number '" + num + "'");
        }
    }
    const std::string suffix = trim(t.substr(num_end));
    if (suffix.empty()) {
        if (!seen_digit)
            throw ConfigError("line " + std::to_string(line) + ": unparsable value '" + token + "'");
        return sign * magnitude;
    }

    static const std::map<std::string, double> units = {
        {"Hz", constants::two_pi},        {"kHz", constants::two_pi * 1e3},
        {"MHz", constants::two_pi * 1e6}, {"GHz", constants::two_pi * 1e9},
        {"mW", 1e-3},                     {"W", 1.0},
        {"mK", 1e-3},                     {"K", 1.0},
        {"nm", 1e-9},                     {"rad", 1.0},
        {"pi", constants::pi}};
    if (auto it = units.find(suffix); it != units.end()) return sign * magnitude * it->second;
    if (auto it = symbols.find(suffix); it != symbols.end()) return sign * magnitude * it->second;
    throw ConfigError("line " + std::to_string(line) + ": unknown unit or symbol '" + suffix + "'");
}

inline std::vector<std::string> split_tokens(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream iss(s);
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

inline std::string canonical_output_name(const std::string& name, int line) {
    std::string n = name;
    if (n == "n_o_given_w") n = "n(o|w)";
    if (n == "n_w_given_o") n = "n(w|o)";
    for (const auto& v : output_vocabulary())
        if (n == v) return n;
    throw ConfigError("line " + std::to_string(line) + ": unknown output '" + name + "'");
}

} // namespace detail

/// Parse the line-oriented `key = value` configuration format.  Unknown
/// keys, unparsable values and out-of-vocabulary axes are rejected with
/// their line number.  Unspecified physics keys fall back to the
/// defaults of default_spec(), with ratio defaults (kappas, detunings,
/// omega) tracking an overridden omega_m.
inline SweepSpec parse_config(std::string_view text) {
    static const std::vector<std::string> scalar_keys = {
        "omega_m", "omega_w", "lambda_o", "Q_m",  "kappa_w", "kappa_o", "delta_w",
        "delta_o", "g_w",     "g_o",      "P_w",  "P_o",     "G",       "theta",
        "T",       "omega",   "eta",      "M",    "n_B"};

    std::map<std::string, detail::RawEntry> raw;
    std::optional<detail::RawEntry> raw_outputs;
    std::vector<std::pair<std::string, detail::RawEntry>> raw_axes;

    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t nl = text.find('\n', start);
        std::string line(text.substr(start, (nl == std::string_view::npos ? text.size() : nl) - start));
        start = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const std::string stripped = detail::trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = detail::trim(stripped.substr(0, eq));
        const std::string value = detail::trim(stripped.substr(eq + 1));
        detail::RawEntry entry{value, line_no};

        std::string canonical = key;
        if (canonical == "lambda") canonical = "lambda_o";
        if (canonical == "g_w_bare") canonical = "g_w";
        if (canonical == "g_o_bare") canonical = "g_o";
        if (canonical == "outputs") {
            raw_outputs = entry;
        } else if (canonical == "axis1" || canonical == "axis2") {
            raw_axes.emplace_back(canonical, entry);
        } else {
            bool known = false;
            for (const auto& k : scalar_keys) known = known || (k == canonical);
            if (!known)
                throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
            raw[canonical] = entry;
        }
    }

    SweepSpec spec = default_spec();
    PhysicalParams& p = spec.base;

    std::map<std::string, double> symbols; // resolved in dependency order
    auto resolve = [&](const char* key, double fallback) {
        if (auto it = raw.find(key); it != raw.end()) {
            const auto toks = detail::split_tokens(it->second.value);
            if (toks.size() != 1)
                throw ConfigError("line " + std::to_string(it->second.line) +
                                  ": expected a single value for '" + std::string(key) + "'");
            return detail::parse_value_token(toks[0], it->second.line, symbols);
        }
        return fallback;
    };

    p.omega_m = resolve("omega_m", p.omega_m);
    symbols["omega_m"] = p.omega_m;
    p.kappa_w = resolve("kappa_w", 0.24 * p.omega_m);
    p.kappa_o = resolve("kappa_o", 0.2 * p.omega_m);
    symbols["kappa_w"] = p.kappa_w;
    symbols["kappa_o"] = p.kappa_o;

    p.omega_w = resolve("omega_w", p.omega_w);
    p.lambda_o = resolve("lambda_o", p.lambda_o);
    p.Q_m = resolve("Q_m", p.Q_m);
    p.delta_w = resolve("delta_w", -p.omega_m);
    p.delta_o = resolve("delta_o", p.omega_m);
    p.g_w_bare = resolve("g_w", p.g_w_bare);
    p.g_o_bare = resolve("g_o", p.g_o_bare);
    p.P_w = resolve("P_w", p.P_w);
    p.P_o = resolve("P_o", p.P_o);
    p.G = resolve("G", p.G);
    p.theta = reduce_angle(resolve("theta", p.theta));
    p.T = resolve("T", p.T);
    spec.omega_eval = resolve("omega", p.omega_m);
    spec.scenario.eta = resolve("eta", spec.scenario.eta);
    spec.scenario.M = resolve("M", spec.scenario.M);
    spec.scenario.n_B = resolve("n_B", spec.scenario.n_B);

    if (raw_outputs) {
        spec.outputs.clear();
        std::string list = raw_outputs->value;
        for (char& ch : list)
            if (ch == ',') ch = ' ';
        for (const auto& tok : detail::split_tokens(list))
            spec.outputs.push_back(detail::canonical_output_name(tok, raw_outputs->line));
        if (spec.outputs.empty())
            throw ConfigError("line " + std::to_string(raw_outputs->line) + ": empty outputs list");
    }

    spec.axes.clear();
    for (const auto& [key, entry] : raw_axes) {
        const auto toks = detail::split_tokens(entry.value);
        if (toks.size() != 4 && !(toks.size() == 5 && toks[4] == "log"))
            throw ConfigError("line " + std::to_string(entry.line) + ": expected '" + key +
                              " = NAME MIN MAX STEPS [log]'");
        AxisSpec ax;
        ax.name = toks[0];
        bool known = false;
        for (const auto& v : axis_vocabulary()) known = known || (v == ax.name);
        if (!known)
            throw ConfigError("line " + std::to_string(entry.line) + ": axis variable '" + ax.name +
                              "' is not sweepable");
        ax.min = detail::parse_value_token(toks[1], entry.line, symbols);
        ax.max = detail::parse_value_token(toks[2], entry.line, symbols);
        try {
            ax.steps = std::stoi(toks[3]);
        } catch (const std::exception&) {
            throw ConfigError("line " + std::to_string(entry.line) + ": unparsable step count '" +
                              toks[3] + "'");
        }
        if (ax.steps < 2)
            throw ConfigError("line " + std::to_string(entry.line) + ": axis needs at least 2 steps");
        ax.log_scale = (toks.size() == 5);
        if (ax.log_scale && !(ax.min > 0.0 && ax.max > 0.0))
            throw ConfigError("line " + std::to_string(entry.line) +
                              ": log axis requires positive bounds");
        spec.axes.push_back(ax);
    }
    if (spec.axes.size() == 2 && spec.axes[0].name == spec.axes[1].name)
        throw ConfigError("axis1 and axis2 sweep the same variable '" + spec.axes[0].name + "'");

    try {
        p.validate();
        spec.scenario.validate();
    } catch (const PhysicsError& e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }
    return spec;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

/// Emit a spec in the same key = value format, with all values in
/// internal SI units so that parse_config(serialize_config(s)) == s.
inline std::string serialize_config(const SweepSpec& s) {
    std::ostringstream out;
    auto kv = [&](const char* k, double v) { out << k << " = " << detail::format_double(v) << "\n"; };
    kv("omega_m", s.base.omega_m);
    kv("omega_w", s.base.omega_w);
    kv("lambda_o", s.base.lambda_o);
    kv("Q_m", s.base.Q_m);
    kv("kappa_w", s.base.kappa_w);
    kv("kappa_o", s.base.kappa_o);
    kv("delta_w", s.base.delta_w);
    kv("delta_o", s.base.delta_o);
    kv("g_w", s.base.g_w_bare);
    kv("g_o", s.base.g_o_bare);
    kv("P_w", s.base.P_w);
    kv("P_o", s.base.P_o);
    kv("G", s.base.G);
    kv("theta", s.base.theta);
    kv("T", s.base.T);
    kv("omega", s.omega_eval);
    kv("eta", s.scenario.eta);
    kv("M", s.scenario.M);
    kv("n_B", s.scenario.n_B);
    out << "outputs = ";
    for (std::size_t i = 0; i < s.outputs.size(); ++i)
        out << (i ? "," : "") << s.outputs[i];
    out << "\n";
    for (std::size_t i = 0; i < s.axes.size(); ++i) {
        const AxisSpec& a = s.axes[i];
        out << "axis" << (i + 1) << " = " << a.name << " " << detail::format_double(a.min) << " "
            << detail::format_double(a.max) << " " << a.steps << (a.log_scale ? " log" : "") << "\n";
    }
    return out.str();
}

} // namespace qiopa
