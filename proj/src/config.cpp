#include "hybridcav/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace hybridcav {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string where(std::string_view field, std::size_t line) {
    std::ostringstream out;
    if (line > 0) out << "line " << line << ": ";
    out << field;
    return out.str();
}

bool parse_bool(std::string_view v, std::string_view field, std::size_t line) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(where(field, line) + ": expected a boolean, got '" + std::string(v) + "'", std::string(field),
                      line);
}

double* numeric_field(SystemParams& p, std::string_view key) {
    if (key == "kappa") return &p.kappa;
    if (key == "kappa1") return &p.kappa1;
    if (key == "kappa2") return &p.kappa2;
    if (key == "delta_a") return &p.delta_a;
    if (key == "delta") return &p.delta;
    if (key == "gamma_atom") return &p.gamma_atom;
    if (key == "g") return &p.g;
    if (key == "n_atoms") return &p.n_atoms;
    if (key == "g0") return &p.g0;
    if (key == "omega_m") return &p.omega_m;
    if (key == "gamma_m") return &p.gamma_m;
    return nullptr;
}

void retie(RunConfig& cfg) {
    const double g2n = cfg.params.g2n();
    if (cfg.tie_delta && g2n >= cfg.params.kappa * cfg.params.kappa) cfg.params.delta = tied_delta(g2n, cfg.params.kappa);
}

}  // namespace

RunConfig config_from_preset(PresetName name) {
    const Preset pr = preset(name);
    RunConfig cfg;
    cfg.params = pr.params;
    cfg.drive = pr.drive;
    cfg.regime = pr.regime;
    cfg.tie_delta = pr.tie_delta;
    cfg.preset = name;
    cfg.assumptions = pr.assumptions;
    return cfg;
}

double parse_number(std::string_view text, std::string_view field, std::size_t line) {
    const auto t = trim(text);
    double v = 0.0;
    const auto* first = t.data();
    const auto* last = t.data() + t.size();
    if (!t.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (t.empty() || ec != std::errc{} || ptr != last || !std::isfinite(v)) {
        throw ConfigError(where(field, line) + ": expected a number, got '" + std::string(t) + "'", std::string(field),
                          line);
    }
    return v;
}

double parse_angle(std::string_view text) {
    auto t = trim(text);
    const auto pos = t.find("pi");
    if (pos == std::string_view::npos) return parse_number(t, "phi");
    auto head = trim(t.substr(0, pos));
    auto tail = trim(t.substr(pos + 2));
    double factor = 1.0;
    if (!head.empty() && head.back() == '*') head = trim(head.substr(0, head.size() - 1));
    if (head == "-") {
        factor = -1.0;
    } else if (!head.empty() && head != "+") {
        factor = parse_number(head, "phi");
    }
    double divisor = 1.0;
    if (!tail.empty()) {
        if (tail.front() != '/') throw ConfigError("phi: cannot parse angle '" + std::string(t) + "'", "phi");
        divisor = parse_number(tail.substr(1), "phi");
        if (divisor == 0.0) throw ConfigError("phi: division by zero in '" + std::string(t) + "'", "phi");
    }
    return factor * std::numbers::pi / divisor;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{"kappa",   "kappa1",  "kappa2", "delta_a", "delta",  "gamma_atom",
                                               "g",       "n_atoms", "g0",     "omega_m", "gamma_m", "g2n",
                                               "xi",      "amp2",    "phi",    "regime",  "tie_delta", "preset"};
    return keys;
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value, std::size_t line) {
    key = trim(key);
    value = trim(value);
    const std::string k(key);
    try {
        if (double* f = numeric_field(cfg.params, key)) {
            *f = parse_number(value, key, line);
            if (key == "kappa1" || key == "kappa2") return;
            if (key == "g" || key == "n_atoms" || key == "kappa") retie(cfg);
            return;
        }
        if (key == "g2n") {
            const double v = parse_number(value, key, line);
            cfg.params = with_g2n(cfg.params, v, cfg.tie_delta && v >= cfg.params.kappa * cfg.params.kappa);
        } else if (key == "xi") {
            cfg.params.g0 = g0_for_xi(parse_number(value, key, line), cfg.params.omega_m, cfg.params.gamma_m);
        } else if (key == "amp2") {
            cfg.drive.amp2 = parse_number(value, key, line);
        } else if (key == "phi") {
            cfg.drive.phi = normalize_phase(parse_angle(value));
        } else if (key == "regime") {
            cfg.regime = parse_regime(value);
        } else if (key == "tie_delta") {
            cfg.tie_delta = parse_bool(value, key, line);
        } else if (key == "preset") {
            auto name = parse_preset_name(value);
            if (!name) throw std::invalid_argument("unknown preset '" + std::string(value) + "'");
            cfg = config_from_preset(*name);
        } else {
            throw ConfigError(where(key, line) + ": unknown key '" + k + "'", k, line);
        }
    } catch (const ConfigError& e) {
        if (e.line() == 0 && line != 0) throw ConfigError(where(key, line) + ": " + e.what(), k, line);
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(where(key, line) + ": " + e.what(), k, line);
    }
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError("override '" + std::string(assignment) + "' is not key=value", std::string(assignment));
    }
    apply_setting(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

RunConfig parse_config(std::string_view text, RunConfig base) {
    RunConfig cfg = std::move(base);
    std::size_t line_no = 0;
    bool seen_setting = false;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value", std::string(line), line_no);
        }
        const auto key = trim(line.substr(0, eq));
        if (key == "preset" && seen_setting) {
            throw ConfigError("line " + std::to_string(line_no) + ": preset must precede other settings", "preset",
                              line_no);
        }
        apply_setting(cfg, key, line.substr(eq + 1), line_no);
        seen_setting = true;
    }
    return cfg;
}

void require_valid(const RunConfig& cfg) {
    const auto v = validate(cfg.params);
    if (!v.empty()) throw ConfigError(v.front().field + ": " + v.front().message, v.front().field);
    if (!(cfg.drive.amp2 >= 0.0)) throw ConfigError("amp2 must be >= 0", "amp2");
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string dump_config(const RunConfig& cfg) {
    std::ostringstream out;
    if (cfg.preset) out << "# preset " << to_string(*cfg.preset) << "\n";
    for (const auto& a : cfg.assumptions) out << "# assumption: " << a << "\n";
    out << "# g2n = " << format_double(cfg.params.g2n()) << " (derived)\n";
    const SystemParams& p = cfg.params;
    const std::pair<const char*, double> fields[] = {
        {"kappa", p.kappa},   {"kappa1", p.kappa1},         {"kappa2", p.kappa2}, {"delta_a", p.delta_a},
        {"delta", p.delta},   {"gamma_atom", p.gamma_atom}, {"g", p.g},           {"n_atoms", p.n_atoms},
        {"g0", p.g0},         {"omega_m", p.omega_m},       {"gamma_m", p.gamma_m},
    };
    for (const auto& [k, v] : fields) out << k << " = " << format_double(v) << "\n";
    out << "amp2 = " << format_double(cfg.drive.amp2) << "\n";
    out << "phi = " << format_double(cfg.drive.phi) << "\n";
    out << "regime = " << to_string(cfg.regime) << "\n";
    out << "tie_delta = " << (cfg.tie_delta ? "true" : "false") << "\n";
    return out.str();
}

}  // namespace hybridcav
