// Command-line front end: single-point roots, sweeps, absorption checks and
// oracle verification. Data goes to files or stdout, diagnostics to stderr.

#include "hybridcav/absorption.hpp"
#include "hybridcav/config.hpp"
#include "hybridcav/io.hpp"
#include "hybridcav/oracle.hpp"
#include "hybridcav/steady_state.hpp"
#include "hybridcav/sweep.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace hybridcav;

namespace {

enum Exit { ok = 0, config_error = 1, solver_failure = 2, verify_failure = 3 };

struct CommonOptions {
    std::string preset;
    std::string config_file;
    std::optional<double> amp2;
    std::string phi;
    std::string regime;
    std::optional<double> g2n;
    std::vector<std::string> sets;
    std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--preset", o.preset, "built-in parameter set");
    cmd->add_option("--config", o.config_file, "key = value configuration file");
    cmd->add_option("--amp2", o.amp2, "input intensity |ain|^2");
    cmd->add_option("--phi", o.phi, "relative phase (radians or multiples of pi)");
    cmd->add_option("--regime", o.regime, "low | full");
    cmd->add_option("--g2n", o.g2n, "collective coupling g^2 N");
    cmd->add_option("--set", o.sets, "key=value override")->take_all();
    cmd->add_option("--out", o.out, "output file (default stdout)");
}

RunConfig resolve(const CommonOptions& o, std::optional<RunConfig> base = std::nullopt) {
    RunConfig cfg = base ? *base : RunConfig{};
    if (!o.preset.empty()) {
        auto name = parse_preset_name(o.preset);
        if (!name) throw ConfigError("unknown preset '" + o.preset + "'", "preset");
        cfg = config_from_preset(*name);
    }
    if (!o.config_file.empty()) {
        std::ifstream in(o.config_file);
        if (!in) throw ConfigError("cannot read config file '" + o.config_file + "'", "config");
        std::stringstream buf;
        buf << in.rdbuf();
        cfg = parse_config(buf.str(), cfg);
    }
    if (!o.regime.empty()) apply_setting(cfg, "regime", o.regime);
    if (o.g2n) apply_setting(cfg, "g2n", format_double(*o.g2n));
    if (o.amp2) cfg.drive.amp2 = *o.amp2;
    if (!o.phi.empty()) apply_setting(cfg, "phi", o.phi);
    for (const auto& s : o.sets) apply_override(cfg, s);
    require_valid(cfg);
    return cfg;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path + "'", "out");
    f << text;
}

json config_json(const RunConfig& cfg) {
    return {{"params", to_json(cfg.params)}, {"drive", to_json(cfg.drive)}, {"regime", std::string(to_string(cfg.regime))}};
}

int cmd_roots(const RunConfig& cfg, bool confirm, const std::string& out) {
    const RootReport rep = solve_steady_states(cfg.params, cfg.drive, cfg.regime);
    const auto labels = classify_stability(cfg.params, cfg.drive, cfg.regime, rep, {confirm});
    json states = json::array();
    for (std::size_t i = 0; i < rep.physical.size(); ++i) {
        SteadyState s = reconstruct_state(cfg.params, cfg.drive, cfg.regime, rep.physical[i]);
        s.stable = labels[i];
        json j = to_json(s, output_intensities(cfg.params, cfg.drive, cfg.regime, s.x));
        j["rhs_residual"] = rhs_residual(cfg.params, cfg.drive, cfg.regime, s.as_mean_field());
        j["nonlinear_gate"] = static_cast<bool>(rep.nonlinear_gate[i]);
        states.push_back(j);
    }
    json doc = config_json(cfg);
    doc["report"] = to_json(rep);
    doc["report"]["stability"] = json::array();
    for (auto l : labels) doc["report"]["stability"].push_back(std::string(to_string(l)));
    doc["states"] = states;
    emit(out, doc.dump(2) + "\n");
    return ok;
}

struct SweepOptions {
    std::string figure;
    std::string axis, spacing, policy;
    std::optional<double> lo, hi;
    std::optional<std::size_t> points, threads;
    std::string folds;
    bool confirm = false;
    bool no_refine = false;
};

int cmd_sweep(const CommonOptions& common, const SweepOptions& so) {
    SweepSpec spec;
    std::optional<RunConfig> base;
    if (!so.figure.empty()) {
        FigureSweep fig;
        try {
            fig = figure_sweep(so.figure);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what(), "figure");
        }
        base = config_from_preset(fig.preset.name);
        spec = fig.spec;
    }
    RunConfig cfg = resolve(common, base);
    try {
        if (!so.axis.empty()) spec.axis = parse_axis(so.axis);
        if (!so.spacing.empty()) spec.spacing = parse_spacing(so.spacing);
        if (!so.policy.empty()) spec.policy = parse_policy(so.policy);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what(), "sweep");
    }
    if (so.lo) spec.lo = *so.lo;
    if (so.hi) spec.hi = *so.hi;
    if (so.points) spec.points = *so.points;
    if (so.threads) spec.threads = *so.threads;
    spec.regime = cfg.regime;
    spec.tie_delta = cfg.tie_delta && spec.axis == SweepAxis::coupling_g2n;
    spec.confirm_stability = so.confirm;
    spec.refine_folds = !so.no_refine;
    const auto problems = validate(spec);
    if (!problems.empty()) throw ConfigError(problems.front(), "sweep");

    const SweepResult res = run_sweep(cfg.params, cfg.drive, spec);
    std::ostringstream csv;
    write_sweep_csv(csv, res, cfg);
    emit(common.out, csv.str());

    std::string folds_path = so.folds;
    if (folds_path.empty() && !common.out.empty()) folds_path = common.out + ".folds.json";
    if (!folds_path.empty()) {
        json side = {{"folds", to_json(res.folds)}, {"multistability", to_json(detect_multistability(res))}};
        emit(folds_path, side.dump(2) + "\n");
    }
    if (!common.out.empty()) {
        std::cerr << "sweep: " << res.records.size() << " points, " << res.folds.size() << " folds\n";
    }
    return ok;
}

int cmd_perfect(const RunConfig& cfg, const std::string& out) {
    json doc = config_json(cfg);
    if (cfg.regime == Regime::LowExcitation) {
        doc["report"] = to_json(check_perfect_linear(cfg.params));
        const auto thr = coupling_threshold(cfg.params);
        doc["coupling_threshold"] = {{"value", thr.value}, {"boundary_warning", thr.boundary_warning},
                                     {"defined", thr.defined}};
    } else {
        doc["report"] = to_json(check_perfect_nonlinear(cfg.params));
    }
    emit(out, doc.dump(2) + "\n");
    return ok;
}

int cmd_phases(const RunConfig& cfg, std::size_t points, const std::string& out) {
    PhaseScanOptions opts;
    opts.points = points;
    json doc = config_json(cfg);
    doc["report"] = to_json(phase_equal_output(cfg.params, cfg.drive.amp2, opts));
    emit(out, doc.dump(2) + "\n");
    return ok;
}

int cmd_verify(const RunConfig& cfg, bool corrupt_a3, bool skip_ode, const std::string& out) {
    const SystemParams& p = cfg.params;
    const DriveConfig& d = cfg.drive;
    Polynomial poly = build_fixed_point_poly(p, d, cfg.regime);
    if (corrupt_a3 && poly.coeffs.size() > 3) poly.coeffs[3] *= 1.0 + 1e-3;
    const auto roots = physical_roots(solve_poly(poly), p, d, cfg.regime);

    GridScanSpec grid = default_grid(p, d);
    grid.points = 400000;
    const auto brackets = residual_grid_scan(p, d, cfg.regime, grid);

    json checks = json::array();
    bool pass = true;
    auto check = [&](const std::string& name, bool okay, json detail) {
        checks.push_back({{"check", name}, {"pass", okay}, {"detail", std::move(detail)}});
        pass = pass && okay;
    };

    bool matched = roots.size() == brackets.size();
    double worst = 0.0;
    for (std::size_t i = 0; matched && i < roots.size(); ++i) {
        const double rel = std::abs(roots[i] - brackets[i].root) / std::max(1e-300, std::abs(brackets[i].root));
        worst = std::max(worst, brackets[i].root == 0.0 ? std::abs(roots[i]) : rel);
    }
    matched = matched && worst <= 1e-7;
    std::vector<double> bracket_roots;
    for (const auto& b : brackets) bracket_roots.push_back(b.root);
    check("grid_scan_matches_polynomial", matched,
          {{"polynomial", roots}, {"grid_scan", bracket_roots}, {"worst_relative", worst}});

    const double rhs_tol = 1e-8 * std::max(1.0, p.n_atoms * p.gamma_atom);
    double worst_rhs = 0.0;
    for (double x : brackets.empty() ? roots : bracket_roots) {
        try {
            const auto s = reconstruct_state(p, d, cfg.regime, x);
            worst_rhs = std::max(worst_rhs, rhs_residual(p, d, cfg.regime, s.as_mean_field()));
        } catch (const SpuriousRoot&) {
            worst_rhs = INFINITY;
        }
    }
    check("steady_state_rhs", worst_rhs <= rhs_tol, {{"worst", worst_rhs}, {"tolerance", rhs_tol}});

    if (!skip_ode && matched && !roots.empty()) {
        const auto heur = heuristic_stability(roots.size());
        json labels = json::array();
        bool agree = true;
        for (std::size_t i = 0; i < roots.size(); ++i) {
            const auto probe = probe_stability(p, d, cfg.regime, roots, i);
            labels.push_back(std::string(to_string(probe.label)));
            if (heur[i] != Stability::unknown && probe.label != heur[i]) agree = false;
        }
        check("ode_stability_pattern", agree, {{"probe", labels}});
    }

    json doc = config_json(cfg);
    doc["checks"] = checks;
    doc["pass"] = pass;
    emit(out, doc.dump(2) + "\n");
    for (const auto& c : checks) {
        std::cerr << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["check"].get<std::string>() << "\n";
    }
    return pass ? ok : verify_failure;
}

int cmd_curve(const RunConfig& cfg, double lo, double hi, std::size_t points, const std::string& out) {
    const auto curve = input_for_absorption_curve(cfg.params, lo, hi, points);
    std::ostringstream csv;
    write_curve_csv(csv, curve, cfg);
    emit(out, csv.str());
    return ok;
}

int cmd_trajectory(const RunConfig& cfg, std::optional<double> t_max, std::optional<double> dt, std::size_t stride,
                   const std::string& init, const std::string& out) {
    MeanFieldState s0;
    s0.s_z = -0.5 * cfg.params.n_atoms;
    double x_scale = intensity_upper_bound(cfg.params, cfg.drive);
    if (init.rfind("root:", 0) == 0) {
        const auto roots = solve_steady_states(cfg.params, cfg.drive, cfg.regime).physical;
        const auto k = static_cast<std::size_t>(parse_number(init.substr(5), "init"));
        if (k >= roots.size()) throw ConfigError("init root index out of range", "init");
        s0 = reconstruct_state(cfg.params, cfg.drive, cfg.regime, roots[k]).as_mean_field();
    } else if (init != "vacuum") {
        throw ConfigError("init must be vacuum or root:<k>", "init");
    }
    IntegrationConfig ic = default_integration(cfg.params, x_scale);
    if (t_max) ic.t_max = *t_max;
    if (dt) ic.dt = *dt;
    ic.stride = stride;
    if (!integration_config_valid(cfg.params, ic)) throw ConfigError("dt violates the integration guard", "dt");
    const auto traj = integrate(cfg.params, cfg.drive, cfg.regime, s0, ic);
    std::ostringstream csv;
    write_trajectory_csv(csv, traj, cfg);
    emit(out, csv.str());
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hybridcav: steady states, multistability and perfect absorption of a driven hybrid cavity"};
    app.require_subcommand(1);

    CommonOptions roots_opt, sweep_opt, perfect_opt, verify_opt, curve_opt, traj_opt, phase_opt;
    bool roots_confirm = false;
    auto* roots = app.add_subcommand("roots", "all steady states at one operating point (JSON)");
    add_common(roots, roots_opt);
    roots->add_flag("--confirm", roots_confirm, "confirm stability labels with the ODE oracle");

    SweepOptions so;
    auto* sweep = app.add_subcommand("sweep", "parameter sweep (CSV plus folds JSON)");
    add_common(sweep, sweep_opt);
    sweep->add_option("--figure", so.figure, "figure panel: fig2 fig3 fig5a fig5b fig6a fig6b");
    sweep->add_option("--axis", so.axis, "drive_amp2 | phase | coupling_g2n | detuning_delta_a");
    sweep->add_option("--lo", so.lo);
    sweep->add_option("--hi", so.hi);
    sweep->add_option("--points", so.points);
    sweep->add_option("--spacing", so.spacing, "linear | log");
    sweep->add_option("--policy", so.policy, "all | up | down");
    sweep->add_option("--folds", so.folds, "folds sidecar JSON (default <out>.folds.json)");
    sweep->add_option("--threads", so.threads);
    sweep->add_flag("--confirm-stability", so.confirm, "probe every root with the ODE oracle");
    sweep->add_flag("--no-refine", so.no_refine, "skip the extra points around folds");

    auto* perfect = app.add_subcommand("perfect", "perfect-absorption conditions and certification (JSON)");
    add_common(perfect, perfect_opt);

    std::size_t phase_points = 4096;
    auto* phases = app.add_subcommand("phases", "relative phases with equal outputs (JSON)");
    add_common(phases, phase_opt);
    phases->add_option("--points", phase_points, "phase grid size");

    bool corrupt_a3 = false, skip_ode = false;
    auto* verify = app.add_subcommand("verify", "oracle equivalence checks");
    add_common(verify, verify_opt);
    verify->add_flag("--corrupt-a3", corrupt_a3, "perturb the cubic coefficient (negative control)");
    verify->add_flag("--skip-ode", skip_ode, "skip the integrator checks");

    double curve_lo = 1.0, curve_hi = 100.0;
    std::size_t curve_points = 200;
    auto* curve = app.add_subcommand("curve", "perfect-absorption drive versus g2n with tied detuning (CSV)");
    add_common(curve, curve_opt);
    curve->add_option("--lo", curve_lo);
    curve->add_option("--hi", curve_hi);
    curve->add_option("--points", curve_points);

    std::optional<double> t_max, dt;
    std::size_t stride = 100;
    std::string init = "vacuum";
    auto* traj = app.add_subcommand("trajectory", "mean-field time evolution (CSV)");
    add_common(traj, traj_opt);
    traj->add_option("--t-max", t_max);
    traj->add_option("--dt", dt);
    traj->add_option("--stride", stride);
    traj->add_option("--init", init, "vacuum | root:<k>");

    std::string dump_name;
    auto* preset_cmd = app.add_subcommand("preset", "built-in presets");
    auto* dump = preset_cmd->add_subcommand("dump", "print a preset as key = value text");
    dump->add_option("name", dump_name)->required();
    auto* list = preset_cmd->add_subcommand("list", "list preset names");
    preset_cmd->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return config_error;
    }

    try {
        if (*roots) return cmd_roots(resolve(roots_opt), roots_confirm, roots_opt.out);
        if (*sweep) return cmd_sweep(sweep_opt, so);
        if (*perfect) return cmd_perfect(resolve(perfect_opt), perfect_opt.out);
        if (*phases) return cmd_phases(resolve(phase_opt), phase_points, phase_opt.out);
        if (*verify) return cmd_verify(resolve(verify_opt), corrupt_a3, skip_ode, verify_opt.out);
        if (*curve) {
            curve_opt.preset = curve_opt.preset.empty() ? "fig2" : curve_opt.preset;
            return cmd_curve(resolve(curve_opt), curve_lo, curve_hi, curve_points, curve_opt.out);
        }
        if (*traj) return cmd_trajectory(resolve(traj_opt), t_max, dt, stride, init, traj_opt.out);
        if (*dump) {
            auto name = parse_preset_name(dump_name);
            if (!name) throw ConfigError("unknown preset '" + dump_name + "'", "preset");
            std::cout << dump_config(config_from_preset(*name));
            return ok;
        }
        if (*list) {
            for (auto n : all_presets()) std::cout << to_string(n) << "\n";
            return ok;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const SolverFailure& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return solver_failure;
    } catch (const SweepFailure& e) {
        std::cerr << "solver failure at axis value " << e.axis_value() << ": " << e.what() << "\n";
        return solver_failure;
    } catch (const SpuriousRoot& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return solver_failure;
    } catch (const DivergenceError& e) {
        std::cerr << "integration diverged after t=" << e.last_finite_time() << ": " << e.what() << "\n";
        return solver_failure;
    }
    return config_error;
}
