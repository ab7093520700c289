#include "hybridcav/model.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hybridcav {

double normalize_phase(double phi) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(phi, two_pi);
    if (r < 0.0) r += two_pi;
    if (r >= two_pi) r = 0.0;
    return r;
}

DriveConfig make_drive(double amp2, double phi) { return DriveConfig{amp2, normalize_phase(phi)}; }

std::string_view to_string(Regime r) {
    return r == Regime::LowExcitation ? "low" : "full";
}

Regime parse_regime(std::string_view s) {
    if (s == "low" || s == "linear" || s == "LowExcitation") return Regime::LowExcitation;
    if (s == "full" || s == "nonlinear" || s == "FullSaturation") return Regime::FullSaturation;
    throw std::invalid_argument("unknown regime '" + std::string(s) + "' (expected low|full)");
}

DerivedQuantities derive_quantities(const SystemParams& p) {
    DerivedQuantities d;
    d.xi = 2.0 * p.omega_m * p.g0 * p.g0 / (p.gamma_m * p.gamma_m + p.omega_m * p.omega_m);
    d.g2n = p.g2n();
    const double half_gamma = 0.5 * p.gamma_atom;
    const double lorentz = half_gamma * half_gamma + p.delta * p.delta;
    d.atom_susc_re = d.g2n * half_gamma / lorentz;
    d.atom_susc_im = d.g2n * p.delta / lorentz;
    d.sat_scale = 2.0 * p.g * p.g / lorentz;
    return d;
}

std::vector<Violation> validate(const SystemParams& p) {
    std::vector<Violation> out;
    auto positive = [&](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) out.push_back({name, std::string(name) + " must be > 0"});
    };
    auto non_negative = [&](double v, const char* name) {
        if (!(v >= 0.0) || !std::isfinite(v)) out.push_back({name, std::string(name) + " must be >= 0"});
    };
    positive(p.kappa, "kappa");
    positive(p.gamma_atom, "gamma_atom");
    positive(p.omega_m, "omega_m");
    non_negative(p.kappa1, "kappa1");
    non_negative(p.kappa2, "kappa2");
    non_negative(p.gamma_m, "gamma_m");
    non_negative(p.g, "g");
    non_negative(p.g0, "g0");
    non_negative(p.n_atoms, "n_atoms");
    if (!std::isfinite(p.delta_a)) out.push_back({"delta_a", "delta_a must be finite"});
    if (!std::isfinite(p.delta)) out.push_back({"delta", "delta must be finite"});
    if (std::abs(p.kappa1 + p.kappa2 - p.kappa) > 1e-12 * std::max(1.0, std::abs(p.kappa))) {
        out.push_back({"kappa1", "kappa1+kappa2 != kappa"});
    }
    return out;
}

double tied_delta(double g2n, double kappa) {
    const double ratio = g2n / (kappa * kappa) - 1.0;
    if (ratio < 0.0) {
        throw std::domain_error("tied detuning needs g^2 N >= kappa^2");
    }
    return -std::sqrt(ratio) * kappa;
}

SystemParams with_g2n(SystemParams p, double g2n, bool tie_delta) {
    if (p.g == 0.0) throw std::invalid_argument("cannot set g2n while g = 0");
    p.n_atoms = g2n / (p.g * p.g);
    if (tie_delta) p.delta = tied_delta(g2n, p.kappa);
    return p;
}

double g0_for_xi(double xi, double omega_m, double gamma_m) {
    return std::sqrt(xi * (gamma_m * gamma_m + omega_m * omega_m) / (2.0 * omega_m));
}

namespace {

constexpr std::array<std::pair<PresetName, std::string_view>, 7> kPresetNames{{
    {PresetName::fig2, "fig2"},
    {PresetName::fig3, "fig3"},
    {PresetName::fig5a, "fig5a"},
    {PresetName::fig5b, "fig5b"},
    {PresetName::fig6a, "fig6a"},
    {PresetName::fig6b, "fig6b"},
    {PresetName::experiment, "experiment"},
}};

// Shared by the low-excitation figures: Gamma = 2, wm = 0.01, gm = 0.1,
// g0 = 0.1, delta tied to g^2 N.
Preset low_excitation_base(PresetName name, double g2n, double delta_a, double amp2) {
    Preset pr;
    pr.name = name;
    pr.regime = Regime::LowExcitation;
    pr.tie_delta = true;
    SystemParams& p = pr.params;
    p.kappa = 1.0;
    p.kappa1 = p.kappa2 = 0.5;
    p.gamma_atom = 2.0;
    p.omega_m = 0.01;
    p.gamma_m = 0.1;
    p.g0 = 0.1;
    p.delta_a = delta_a;
    p.g = 0.1;
    p = with_g2n(p, g2n, true);
    pr.drive = make_drive(amp2, 0.0);
    pr.assumptions.push_back("g^2 N split as g = 0.1, N = g^2 N / 0.01 (only g^2 N enters the low-excitation steady state)");
    return pr;
}

Preset nonlinear_base(PresetName name, double xi) {
    Preset pr;
    pr.name = name;
    pr.regime = Regime::FullSaturation;
    SystemParams& p = pr.params;
    p.kappa = 1.0;
    p.kappa1 = p.kappa2 = 0.5;
    p.delta_a = 60.0;
    p.delta = 3.0;
    p.gamma_atom = 2.0;
    p.g = std::sqrt(0.24);
    p.n_atoms = 1000.0;
    p.omega_m = 0.01;
    p.gamma_m = 0.1;
    p.g0 = xi > 0.0 ? g0_for_xi(xi, p.omega_m, p.gamma_m) : 0.0;
    pr.drive = make_drive(500.0, 0.0);
    pr.assumptions = {
        "Gamma = 2 kappa (not given for this figure; carried over from the low-excitation figures)",
        "g^2 N = 240 split as g^2 = 0.24, N = 1000",
        "Xi realised with wm = 0.01, gm = 0.1 and g0 solved from the Xi formula",
    };
    return pr;
}

}  // namespace

std::string_view to_string(PresetName n) {
    for (const auto& [k, v] : kPresetNames)
        if (k == n) return v;
    return "?";
}

std::optional<PresetName> parse_preset_name(std::string_view s) {
    for (const auto& [k, v] : kPresetNames)
        if (v == s) return k;
    return std::nullopt;
}

const std::vector<PresetName>& all_presets() {
    static const std::vector<PresetName> names = [] {
        std::vector<PresetName> v;
        for (const auto& kv : kPresetNames) v.push_back(kv.first);
        return v;
    }();
    return names;
}

Preset preset(PresetName name) {
    switch (name) {
        case PresetName::fig2: {
            Preset pr = low_excitation_base(name, 30.0, -5.0, 100.0);
            return pr;
        }
        case PresetName::fig3: {
            Preset pr = low_excitation_base(name, 100.0, -5.0, 250.0);
            pr.assumptions.push_back("g^2 N = 100 (not given; places the perfect-absorption drive at |ain|^2 ~ 250 inside the bistable window)");
            return pr;
        }
        case PresetName::fig5a: {
            Preset pr = low_excitation_base(name, 50.0, -8.0, 100.0);
            pr.assumptions.push_back("g^2 N = 50 (not given; no single g^2 N under the tied detuning reproduces both phase panels and the bistable perfect absorption of fig3)");
            return pr;
        }
        case PresetName::fig5b: {
            Preset pr = low_excitation_base(name, 50.0, -5.0, 250.0);
            pr.assumptions.push_back("g^2 N = 50 (see fig5a)");
            return pr;
        }
        case PresetName::fig6a:
            return nonlinear_base(name, 0.0065);
        case PresetName::fig6b: {
            Preset pr = nonlinear_base(name, 0.0);
            pr.assumptions.push_back("Xi = 0 (cavity QED limit curve); the g = 0 curve is obtained with g=0");
            return pr;
        }
        case PresetName::experiment: {
            Preset pr;
            pr.name = name;
            pr.regime = Regime::LowExcitation;
            const LabFrequencies lab;
            SystemParams& p = pr.params;
            p.kappa = 1.0;
            p.kappa1 = p.kappa2 = 0.5;
            p.omega_m = to_kappa_units(lab.omega_m_hz, lab.kappa_hz);
            p.g0 = to_kappa_units(lab.g0_hz, lab.kappa_hz);
            p.gamma_atom = to_kappa_units(lab.gamma_atom_hz, lab.kappa_hz);
            p.gamma_m = 0.1 * p.omega_m;
            const double g_sqrt_n = lab.g_sqrt_n_over_gamma * p.gamma_atom;
            p.n_atoms = 1e4;
            p.g = g_sqrt_n / std::sqrt(p.n_atoms);
            p.delta_a = 0.0;
            p.delta = 0.0;
            pr.drive = make_drive(1.0, 0.0);
            pr.assumptions = {
                "mechanical damping = 0.1 omega_m (not quoted)",
                "N = 1e4 with g sqrt(N) = 20 Gamma",
                "detunings set to zero (not quoted)",
            };
            return pr;
        }
    }
    throw std::invalid_argument("unknown preset");
}

Preset preset(std::string_view name) {
    auto n = parse_preset_name(name);
    if (!n) throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
    return preset(*n);
}

}  // namespace hybridcav
