#pragma once

#include "hybridcav/absorption.hpp"
#include "hybridcav/model.hpp"
#include "hybridcav/steady_state.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hybridcav {

enum class SweepAxis { drive_amp2, phase, coupling_g2n, detuning_delta_a };
enum class Spacing { linear, log };
enum class BranchPolicy { all, up_sweep, down_sweep };

[[nodiscard]] std::string_view to_string(SweepAxis a);
[[nodiscard]] std::string_view to_string(Spacing s);
[[nodiscard]] std::string_view to_string(BranchPolicy b);
[[nodiscard]] SweepAxis parse_axis(std::string_view s);
[[nodiscard]] Spacing parse_spacing(std::string_view s);
[[nodiscard]] BranchPolicy parse_policy(std::string_view s);

struct SweepSpec {
    SweepAxis axis = SweepAxis::drive_amp2;
    double lo = 0.0;
    double hi = 1.0;
    std::size_t points = 2000;
    Spacing spacing = Spacing::linear;
    Regime regime = Regime::LowExcitation;
    BranchPolicy policy = BranchPolicy::all;
    bool tie_delta = false;         ///< coupling axis: delta follows tied_delta(g^2 N)
    bool refine_folds = true;       ///< three extra points inside every count-changing step
    bool confirm_stability = false; ///< probe every root with the ODE oracle (slow)
    std::size_t threads = 0;        ///< 0 = hardware concurrency
};

/// Empty when the spec is usable.
[[nodiscard]] std::vector<std::string> validate(const SweepSpec& spec);

/// Axis values from the exact endpoints (no accumulated increments).
[[nodiscard]] std::vector<double> axis_values(const SweepSpec& spec);

/// Parameters and drive at one axis value.
[[nodiscard]] std::pair<SystemParams, DriveConfig> apply_axis(const SystemParams& p, const DriveConfig& drive,
                                                              const SweepSpec& spec, double value);

struct BranchRecord {
    double x = 0.0;
    OutputIntensities outputs;
    Stability stability = Stability::unknown;
};

struct SweepRecord {
    double axis_value = 0.0;
    std::vector<BranchRecord> branches;     ///< ascending in x
    std::optional<std::size_t> selected;    ///< up/down policies only
    bool jittered = false;                  ///< an even root count was re-solved at amp2 (1 + 1e-9)
};

struct FoldPoint {
    double axis_value = 0.0;  ///< bisected location of the count change
    std::size_t count_before = 0;
    std::size_t count_after = 0;
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepRecord> records;  ///< ascending axis value
    std::vector<FoldPoint> folds;
};

class SweepFailure : public std::runtime_error {
public:
    SweepFailure(const std::string& what, double axis_value)
        : std::runtime_error(what), axis_value_(axis_value) {}
    [[nodiscard]] double axis_value() const { return axis_value_; }

private:
    double axis_value_;
};

/// Solves every axis point, refines around count changes and applies the
/// branch policy. Throws SweepFailure carrying the failing axis value.
[[nodiscard]] SweepResult run_sweep(const SystemParams& p, const DriveConfig& drive, const SweepSpec& spec);

/// Up and down sweeps of the drive axis.
[[nodiscard]] std::pair<SweepResult, SweepResult> hysteresis_loop(const SystemParams& p, const DriveConfig& drive,
                                                                  SweepSpec spec);

/// Re-applies a selection policy to an existing record list.
void select_branches(SweepResult& result, BranchPolicy policy);

struct MultistableInterval {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t max_root_count = 0;
    std::string label;  ///< "bistable" or "multistable"
};

/// Maximal runs of consecutive records sharing a root count of at least 3.
[[nodiscard]] std::vector<MultistableInterval> detect_multistability(const SweepResult& result);

/// Axis intervals [v_i, v_i+1] across which the root count changes and the
/// selected x moves by more than 10 % of its larger value.
[[nodiscard]] std::vector<std::pair<double, double>> selection_jumps(const SweepResult& result);

struct AbsorptionCurvePoint {
    double g2n = 0.0;
    double amp2 = 0.0;
    double x = 0.0;
    bool certified = false;
};

struct OmittedPoint {
    double g2n = 0.0;
    std::string reason;
};

struct AbsorptionCurve {
    std::vector<AbsorptionCurvePoint> points;
    std::vector<OmittedPoint> omitted;
};

/// Perfect-absorption drive as a function of g^2 N with delta tied to g^2 N.
[[nodiscard]] AbsorptionCurve input_for_absorption_curve(const SystemParams& p, double g2n_lo, double g2n_hi,
                                                         std::size_t points);

/// Built-in sweep for one figure panel.
struct FigureSweep {
    std::string name;
    Preset preset;
    DriveConfig drive;
    SweepSpec spec;
};

[[nodiscard]] const std::vector<std::string>& figure_names();
/// Throws std::invalid_argument for unknown names.
[[nodiscard]] FigureSweep figure_sweep(std::string_view name);

}  // namespace hybridcav
