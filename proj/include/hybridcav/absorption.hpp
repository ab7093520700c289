#pragma once

#include "hybridcav/model.hpp"
#include "hybridcav/steady_state.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hybridcav {

struct OutputIntensities {
    double out1 = 0.0;  ///< |a1out|^2 / |ain|^2
    double out2 = 0.0;  ///< |a2out|^2 / |ain|^2
    double absorbed_fraction = 0.0;
};

/// a1out = sqrt(2 k1) a - |ain|, a2out = sqrt(2 k2) a - e^{i phi} |ain|.
[[nodiscard]] std::pair<cplx, cplx> output_fields(const SystemParams& p, const DriveConfig& drive,
                                                  const SteadyState& state);

/// Normalized outputs at intensity x from the closed form
/// |sqrt(2 k1) (sqrt(2 k1) + sqrt(2 k2) e^{i phi}) / D(x) - 1|^2 (and the port-2 analogue).
/// Independent of |ain| once x is fixed, so it is defined at zero drive too.
[[nodiscard]] OutputIntensities output_intensities(const SystemParams& p, const DriveConfig& drive, Regime regime,
                                                   double x);

struct AbsorptionTolerances {
    double condition = 1e-9;  ///< on each condition residual (units of kappa)
    double output = 1e-6;     ///< on out1 and out2
};

struct NamedValue {
    std::string name;
    double value = 0.0;
};

struct CertifiedPoint {
    double amp2 = 0.0;
    double x = 0.0;
    std::size_t branch = 0;      ///< index into the sorted physical roots
    std::size_t root_count = 0;  ///< physical roots at this drive
    OutputIntensities outputs;
};

struct PerfectAbsorptionReport {
    Regime regime = Regime::LowExcitation;
    std::vector<NamedValue> condition_residuals;
    std::optional<double> required_x;
    std::vector<double> required_amp2;
    std::vector<CertifiedPoint> certified;
    std::vector<NamedValue> crosswalk;  ///< alternative closed forms, never used for decisions
    bool drive_independent = false;
    bool feasible = false;
    std::vector<std::string> notes;
};

/// Solves at (amp2, phi = 0) and returns the branch whose outputs both vanish.
[[nodiscard]] std::optional<CertifiedPoint> certify_operating_point(const SystemParams& p, double amp2,
                                                                    Regime regime,
                                                                    const AbsorptionTolerances& tol = {});

/// Low-excitation conditions Re D = 2 kappa (drive independent) and Im D(x) = 0.
/// required_x = (Da - susc_im) / Xi, required_amp2 = kappa required_x.
/// With Xi = 0 absorption is possible only when Da = susc_im; it then holds at any
/// drive and is certified at probe_amp2.
[[nodiscard]] PerfectAbsorptionReport check_perfect_linear(const SystemParams& p, const AbsorptionTolerances& tol = {},
                                                           double probe_amp2 = 1.0);

struct CouplingThreshold {
    double value = 0.0;
    bool boundary_warning = false;  ///< Da = 0, the Da > 0 branch was used
    bool defined = true;            ///< false when the square root argument is negative
};

/// Smallest g^2 N admitting a positive perfect-absorption drive:
/// (Da^2 + kappa Gamma + sqrt(Da^4 + 2 kappa Gamma Da^2 - 4 Da^2)) / 2 for Da < 0,
/// kappa Gamma / 2 for Da >= 0.
[[nodiscard]] CouplingThreshold coupling_threshold(const SystemParams& p);

/// Saturated conditions. Candidate A comes from Re D = 2 kappa alone and
/// candidate B from Im D = 0 combined with it; each is certified by a quintic
/// solve at that drive.
[[nodiscard]] PerfectAbsorptionReport check_perfect_nonlinear(const SystemParams& p,
                                                              const AbsorptionTolerances& tol = {});

struct NonlinearCandidates {
    std::optional<double> a;
    std::optional<double> b;
};
[[nodiscard]] NonlinearCandidates nonlinear_candidates(const SystemParams& p);

struct PhaseScanOptions {
    std::size_t points = 4096;
    double match_tol = 1e-8;  ///< |out1 - out2| accepted at a refined crossing
};

struct PhaseEqualReport {
    std::vector<double> phases;  ///< sorted, in [0, 2 pi)
    double c = 0.0;              ///< cos(phi) at which Im D vanishes (NaN if no such x)
    double c_crosswalk = 0.0;    ///< alternative closed form with delta standing in for delta_0
    bool extra_crossings = false;
    std::vector<std::string> notes;
};

/// Phases with out1 = out2 on the branch an up-sweep from zero drive would
/// follow (the smallest physical root), in the low-excitation regime.
[[nodiscard]] PhaseEqualReport phase_equal_output(const SystemParams& p, double amp2,
                                                  const PhaseScanOptions& opts = {});

}  // namespace hybridcav
