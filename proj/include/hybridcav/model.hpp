#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hybridcav {

/// Physical parameters of the two-port hybrid atom-optomechanical cavity.
///
/// All rates and detunings are expressed in units of the total cavity decay
/// rate (kappa = 1 for every built-in preset). The atom number is a real
/// number: only g^2 N and g^2 enter the steady-state equations.
struct SystemParams {
    double kappa = 1.0;       ///< total cavity decay rate
    double kappa1 = 0.5;      ///< port-1 decay rate
    double kappa2 = 0.5;      ///< port-2 decay rate
    double delta_a = 0.0;     ///< cavity-laser detuning
    double delta = 0.0;       ///< atom-laser detuning
    double gamma_atom = 2.0;  ///< atomic linewidth
    double g = 0.0;           ///< single-atom coupling
    double n_atoms = 0.0;     ///< atom number (continuous)
    double g0 = 0.0;          ///< single-photon optomechanical coupling
    double omega_m = 0.01;    ///< mechanical frequency
    double gamma_m = 0.1;     ///< mechanical amplitude damping

    [[nodiscard]] double g2n() const { return g * g * n_atoms; }
};

/// Two-port coherent drive: a1in = |ain|, a2in = exp(i phi) |ain|.
struct DriveConfig {
    double amp2 = 0.0;  ///< common input intensity |ain|^2
    double phi = 0.0;   ///< relative phase, kept in [0, 2 pi)
};

/// Wraps an angle into [0, 2 pi).
[[nodiscard]] double normalize_phase(double phi);

[[nodiscard]] DriveConfig make_drive(double amp2, double phi);

/// Treatment of the atomic inversion in the steady state.
enum class Regime {
    LowExcitation,   ///< <S^z> pinned at -N/2 (cubic fixed point)
    FullSaturation,  ///< <S^z> = -N / (2 (1 + sat_scale x)) (quintic fixed point)
};

[[nodiscard]] std::string_view to_string(Regime r);
[[nodiscard]] Regime parse_regime(std::string_view s);

struct DerivedQuantities {
    double xi = 0.0;            ///< radiation-pressure Kerr coefficient 2 wm g0^2 / (gm^2 + wm^2)
    double g2n = 0.0;           ///< collective coupling g^2 N
    double atom_susc_re = 0.0;  ///< g^2 N (Gamma/2) / ((Gamma/2)^2 + delta^2)
    double atom_susc_im = 0.0;  ///< g^2 N delta / ((Gamma/2)^2 + delta^2)
    double sat_scale = 0.0;     ///< 2 g^2 / (Gamma^2/4 + delta^2)
};

[[nodiscard]] DerivedQuantities derive_quantities(const SystemParams& p);

struct Violation {
    std::string field;
    std::string message;
};

/// Returns every violated parameter invariant; empty when the set is valid.
[[nodiscard]] std::vector<Violation> validate(const SystemParams& p);

/// Atom-laser detuning tied to the collective coupling,
/// delta = -sqrt(g^2 N / kappa^2 - 1) kappa. Requires g^2 N >= kappa^2.
[[nodiscard]] double tied_delta(double g2n, double kappa);

/// Sets g^2 N by rescaling the atom number at fixed g (g must be nonzero).
/// With tie_delta the atom detuning follows tied_delta().
[[nodiscard]] SystemParams with_g2n(SystemParams p, double g2n, bool tie_delta);

/// Optomechanical coupling reproducing a target Kerr coefficient at the
/// given mechanical frequency and damping.
[[nodiscard]] double g0_for_xi(double xi, double omega_m, double gamma_m);

enum class PresetName { fig2, fig3, fig5a, fig5b, fig6a, fig6b, experiment };

[[nodiscard]] std::string_view to_string(PresetName n);
[[nodiscard]] std::optional<PresetName> parse_preset_name(std::string_view s);
[[nodiscard]] const std::vector<PresetName>& all_presets();

/// Raw laboratory numbers (Hz, divided by 2 pi) for the experiment preset.
struct LabFrequencies {
    double omega_m_hz = 4.2e4;
    double g0_hz = 6e5;
    double kappa_hz = 6.6e5;
    double gamma_atom_hz = 3e6;
    double g_sqrt_n_over_gamma = 20.0;
};

/// Converts a frequency quoted in Hz to units of kappa.
[[nodiscard]] inline double to_kappa_units(double hz, double kappa_hz) { return hz / kappa_hz; }

struct Preset {
    PresetName name{};
    SystemParams params;
    DriveConfig drive;
    Regime regime = Regime::LowExcitation;
    /// When set, delta is a function of g^2 N (see tied_delta()).
    bool tie_delta = false;
    /// Parameter choices not fixed by the figure they reproduce.
    std::vector<std::string> assumptions;
};

/// Built-in parameter sets; throws std::invalid_argument for unknown names.
[[nodiscard]] Preset preset(PresetName name);
[[nodiscard]] Preset preset(std::string_view name);

}  // namespace hybridcav
