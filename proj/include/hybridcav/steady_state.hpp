#pragma once

#include "hybridcav/mean_field.hpp"
#include "hybridcav/model.hpp"
#include "hybridcav/polynomial.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hybridcav {

enum class Stability { stable, unstable, unknown };

[[nodiscard]] std::string_view to_string(Stability s);

/// Raised when no physical root survives for a drive that must produce one.
class SolverFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a root does not reproduce itself through the field reconstruction.
class SpuriousRoot : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RootTolerances {
    double imag = 1e-8;   ///< |Im r| <= imag (1 + |Re r|)
    double resid = 1e-7;  ///< |x |D|^2 - K| <= resid max(1, K)
    double dedup = 1e-8;  ///< roots closer than this (relative) are merged
    double fold = 1e-5;   ///< neighbouring roots closer than this flag a fold
};

/// Cavity response D(x) = i Da + kappa + g^2 N / [(Gamma/2 + i delta)(1 + s(x))] - i Xi x,
/// with s(x) = sat_scale x under saturation and 0 in the low-excitation limit.
[[nodiscard]] cplx denominator(const SystemParams& p, const DerivedQuantities& d, Regime regime, double x);

/// K = |sqrt(2 k1) + sqrt(2 k2) e^{i phi}|^2 |ain|^2; equals kappa |ain|^2 (2 + 2 cos phi)
/// for symmetric ports.
[[nodiscard]] double drive_strength(const SystemParams& p, const DriveConfig& drive);

/// Un-multiplied fixed-point residual f(x) = x |D(x)|^2 - K.
[[nodiscard]] double fixed_point_residual(const SystemParams& p, const DriveConfig& drive, Regime regime, double x);

/// Upper bound on any physical root: Re D >= kappa implies x <= K / kappa^2.
[[nodiscard]] double intensity_upper_bound(const SystemParams& p, const DriveConfig& drive);

/// Real polynomial whose non-negative roots solve x |D(x)|^2 = K.
///
/// Writing D(x) = P(x) / (1 + s x) with
///   P(x) = (kappa + i Da + C) + (s (kappa + i Da) - i Xi) x - i Xi s x^2,
///   C = g^2 N / (Gamma/2 + i delta),
/// the saturated equation is x |P(x)|^2 - K (1 + s x)^2 = 0 (degree 5); in the
/// low-excitation limit s = 0 and it collapses to the cubic
///   Xi^2 x^3 - 2 I Xi x^2 + (R^2 + I^2) x - K,  R = kappa + susc_re, I = Da - susc_im.
///
/// Crosswalk to the A0..A5 form written with tG = Gamma/2 + i delta,
/// tk = kappa + i Da and td = s: multiplying P by tG gives
///   p0 = tk tG + g^2 N,  p1 = tG (s tk - i Xi),  p2 = -i Xi s tG,
/// and x |p0 + p1 x + p2 x^2|^2 - |tG|^2 K (1 + s x)^2 reproduces
///   A0 = -|tG|^2 K,  A1 = |p0|^2 - 2 s |tG|^2 K,  A5 = s^2 Xi^2 |tG|^2
/// (that form writes |ain|^2 where K appears here). Its A2..A4 put td on the
/// Xi term of p1 and drop a conj(tG) in A4; they are not used.
/// Exactly vanishing leading coefficients are trimmed (Xi = 0 and/or g = 0).
[[nodiscard]] Polynomial build_fixed_point_poly(const SystemParams& p, const DriveConfig& drive, Regime regime);

/// Filters complex roots down to sorted, deduplicated, residual-checked intensities.
[[nodiscard]] std::vector<double> physical_roots(std::span<const cplx> roots, const SystemParams& p,
                                                 const DriveConfig& drive, Regime regime,
                                                 const RootTolerances& tol = {});

struct RootReport {
    Polynomial polynomial;
    std::vector<cplx> all_roots;
    std::vector<double> physical;
    std::vector<double> residuals;        ///< |f(x)| per physical root
    std::vector<Stability> stability;     ///< per physical root
    std::vector<bool> nonlinear_gate;     ///< x > Gamma^2 / (4 g^2) per physical root
    bool near_fold = false;               ///< two physical roots within tol.fold (relative)
};

/// Builds, solves and filters the fixed-point polynomial at one operating point.
/// Stability carries the heuristic alternating labels. Throws SolverFailure when
/// no physical root exists for a nonzero drive.
[[nodiscard]] RootReport solve_steady_states(const SystemParams& p, const DriveConfig& drive, Regime regime,
                                             const RootTolerances& tol = {});

struct SteadyState {
    double x = 0.0;
    cplx a{};
    cplx b{};
    cplx s_minus{};
    double s_z = 0.0;
    Stability stable = Stability::unknown;

    [[nodiscard]] MeanFieldState as_mean_field() const { return {a, b, s_minus, s_z, 0.0}; }
};

/// Rebuilds every mode amplitude from an intensity root. Throws SpuriousRoot when
/// |a|^2 disagrees with x beyond 1e-8 relative.
[[nodiscard]] SteadyState reconstruct_state(const SystemParams& p, const DriveConfig& drive, Regime regime,
                                            double x);

/// Largest absolute right-hand side of the equations of motion at a state.
[[nodiscard]] double rhs_residual(const SystemParams& p, const DriveConfig& drive, Regime regime,
                                  const MeanFieldState& state);

/// Heuristic labels: stable / unstable alternating from the lowest root on an
/// odd-count branch set; every label is unknown for an even count.
[[nodiscard]] std::vector<Stability> heuristic_stability(std::size_t root_count);

struct StabilityOptions {
    bool confirm_with_ode = false;
};

/// Labels each physical root. With confirm_with_ode every root is probed by
/// integrating from slightly perturbed initial states; disagreements resolve in
/// favour of the integrator, and labels it could not settle become unknown.
[[nodiscard]] std::vector<Stability> classify_stability(const SystemParams& p, const DriveConfig& drive,
                                                        Regime regime, const RootReport& report,
                                                        const StabilityOptions& opts = {});

}  // namespace hybridcav
