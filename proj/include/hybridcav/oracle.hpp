#pragma once

#include "hybridcav/mean_field.hpp"
#include "hybridcav/model.hpp"
#include "hybridcav/steady_state.hpp"

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace hybridcav {

enum class IntegrationMethod { rk4 };

struct IntegrationConfig {
    double dt = 1e-3;
    double t_max = 1000.0;
    double settle_tol = 1e-10;  ///< threshold on scaled_rate_norm()
    std::size_t stride = 1;     ///< trajectory sampling stride (steps)
    IntegrationMethod method = IntegrationMethod::rk4;
};

/// Fastest frequency in the equations of motion at intensity scale x.
[[nodiscard]] double max_rate(const SystemParams& p, double x_scale);

/// Slowest bare relaxation rate (kappa, Gamma/2, gamma_m).
[[nodiscard]] double min_decay_rate(const SystemParams& p);

/// dt = 0.01 / max_rate, horizon 400 / min_decay_rate.
[[nodiscard]] IntegrationConfig default_integration(const SystemParams& p, double x_scale);

/// dt > 0 and dt max(Gamma, kappa, wm, g sqrt(N)) <= 0.1.
[[nodiscard]] bool integration_config_valid(const SystemParams& p, const IntegrationConfig& cfg);

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, double last_finite_time)
        : std::runtime_error(what), last_finite_time_(last_finite_time) {}
    [[nodiscard]] double last_finite_time() const { return last_finite_time_; }

private:
    double last_finite_time_;
};

/// One classical RK4 step of the mean-field equations.
[[nodiscard]] MeanFieldState rk4_step(const SystemParams& p, const DriveConfig& drive, Regime regime,
                                      const MeanFieldState& s, double dt);

/// Fixed-step integration from init up to cfg.t_max; the trajectory holds the
/// initial state, every cfg.stride-th step and the final state.
/// Throws DivergenceError on a non-finite state and std::invalid_argument on an
/// invalid configuration.
[[nodiscard]] std::vector<MeanFieldState> integrate(const SystemParams& p, const DriveConfig& drive, Regime regime,
                                                    const MeanFieldState& init, const IntegrationConfig& cfg);

enum class SettleStatus { converged, limit_cycle, not_converged };

struct SettleResult {
    SettleStatus status = SettleStatus::not_converged;
    MeanFieldState state;
    double rate_norm = 0.0;
};

/// Integrates until scaled_rate_norm() drops below cfg.settle_tol or t_max.
/// A non-decaying oscillation of |a|^2 over consecutive windows is reported as
/// a limit cycle instead of a state.
[[nodiscard]] SettleResult settle(const SystemParams& p, const DriveConfig& drive, Regime regime,
                                  const MeanFieldState& init, const IntegrationConfig& cfg);

struct ProbeResult {
    Stability label = Stability::unknown;
    double epsilon = 0.0;              ///< relative perturbation of x actually used
    std::vector<SettleResult> runs;    ///< the +eps and -eps runs
    std::vector<double> settled_x;
};

/// Probes root `index` of the sorted physical roots: the cavity field is
/// scaled so that x -> x (1 +- eps), eps = min(1%, a quarter of the relative
/// gap to the nearest other root), and both runs are settled. Stable when both
/// return to the root (1e-5 relative), unstable when either lands elsewhere or
/// oscillates, unknown otherwise.
[[nodiscard]] ProbeResult probe_stability(const SystemParams& p, const DriveConfig& drive, Regime regime,
                                          const std::vector<double>& roots, std::size_t index);
[[nodiscard]] ProbeResult probe_stability(const SystemParams& p, const DriveConfig& drive, Regime regime,
                                          const std::vector<double>& roots, std::size_t index,
                                          const IntegrationConfig& cfg);

struct GridScanSpec {
    double x_max = 0.0;
    double step = 1e-3;         ///< linear spacing
    std::size_t points = 0;     ///< > 0 selects geometric spacing with this many points
    double refine_tol = 1e-10;  ///< relative bisection width
};

/// Linear grid up to the rigorous bound K / kappa^2 with step 1e-3.
[[nodiscard]] GridScanSpec default_grid(const SystemParams& p, const DriveConfig& drive);

struct Bracket {
    double lo = 0.0;
    double hi = 0.0;
    double root = 0.0;
};

/// Sign changes of f(x) = x |D(x)|^2 - K on a grid, each refined by bisection.
[[nodiscard]] std::vector<Bracket> residual_grid_scan(const SystemParams& p, const DriveConfig& drive, Regime regime,
                                                      const GridScanSpec& spec);

}  // namespace hybridcav
