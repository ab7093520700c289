#pragma once

#include "hybridcav/absorption.hpp"
#include "hybridcav/config.hpp"
#include "hybridcav/mean_field.hpp"
#include "hybridcav/steady_state.hpp"
#include "hybridcav/sweep.hpp"

#include <json.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace hybridcav {

using json = nlohmann::ordered_json;

[[nodiscard]] json to_json(const SystemParams& p);
[[nodiscard]] json to_json(const DriveConfig& d);
[[nodiscard]] json to_json(const RootReport& r);
[[nodiscard]] json to_json(const SteadyState& s, const OutputIntensities& out);
[[nodiscard]] json to_json(const PerfectAbsorptionReport& r);
[[nodiscard]] json to_json(const PhaseEqualReport& r);
[[nodiscard]] json to_json(const std::vector<FoldPoint>& folds);
[[nodiscard]] json to_json(const std::vector<MultistableInterval>& intervals);

/// One line of space-separated key=value pairs, every value at 17 digits.
[[nodiscard]] std::string params_comment(const RunConfig& cfg);

/// Header axis,branch,count,x,out1,out2,stable,selected preceded by a
/// "# params" comment line; one row per (axis value, branch). The selected
/// column is empty under policy all.
void write_sweep_csv(std::ostream& out, const SweepResult& result, const RunConfig& cfg);

/// Columns t,re_a,im_a,abs_a2,re_b,im_b,s_z.
void write_trajectory_csv(std::ostream& out, const std::vector<MeanFieldState>& traj, const RunConfig& cfg);

/// Columns g2n,amp2,x,certified followed by omitted points as comment lines.
void write_curve_csv(std::ostream& out, const AbsorptionCurve& curve, const RunConfig& cfg);

}  // namespace hybridcav
