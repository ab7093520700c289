#include "hybridcav/io.hpp"

#include <cmath>

namespace hybridcav {

namespace {

json complex_pair(const cplx& z) { return json::array({z.real(), z.imag()}); }

json named(const std::vector<NamedValue>& values) {
    json out = json::object();
    for (const auto& v : values) out[v.name] = v.value;
    return out;
}

json outputs_json(const OutputIntensities& o) {
    return {{"out1", o.out1}, {"out2", o.out2}, {"absorbed_fraction", o.absorbed_fraction}};
}

}  // namespace

json to_json(const SystemParams& p) {
    return {{"kappa", p.kappa},     {"kappa1", p.kappa1},         {"kappa2", p.kappa2},   {"delta_a", p.delta_a},
            {"delta", p.delta},     {"gamma_atom", p.gamma_atom}, {"g", p.g},             {"n_atoms", p.n_atoms},
            {"g0", p.g0},           {"omega_m", p.omega_m},       {"gamma_m", p.gamma_m}, {"g2n", p.g2n()},
            {"xi", derive_quantities(p).xi}};
}

json to_json(const DriveConfig& d) { return {{"amp2", d.amp2}, {"phi", d.phi}}; }

json to_json(const RootReport& r) {
    json roots = json::array();
    for (const auto& z : r.all_roots) roots.push_back(complex_pair(z));
    json labels = json::array();
    for (auto s : r.stability) labels.push_back(std::string(to_string(s)));
    json gates = json::array();
    for (bool b : r.nonlinear_gate) gates.push_back(b);
    return {{"coefficients", r.polynomial.coeffs}, {"roots", roots},          {"physical", r.physical},
            {"residuals", r.residuals},            {"stability", labels},     {"nonlinear_gate", gates},
            {"near_fold", r.near_fold}};
}

json to_json(const SteadyState& s, const OutputIntensities& out) {
    return {{"x", s.x},
            {"a", complex_pair(s.a)},
            {"b", complex_pair(s.b)},
            {"s_minus", complex_pair(s.s_minus)},
            {"s_z", s.s_z},
            {"stability", std::string(to_string(s.stable))},
            {"outputs", outputs_json(out)}};
}

json to_json(const PerfectAbsorptionReport& r) {
    json pts = json::array();
    for (const auto& c : r.certified) {
        pts.push_back({{"amp2", c.amp2},
                       {"x", c.x},
                       {"branch", c.branch},
                       {"root_count", c.root_count},
                       {"outputs", outputs_json(c.outputs)}});
    }
    json rx = r.required_x ? json(*r.required_x) : json(nullptr);
    return {{"regime", std::string(to_string(r.regime))},
            {"feasible", r.feasible},
            {"drive_independent", r.drive_independent},
            {"required_x", rx},
            {"required_amp2", r.required_amp2},
            {"condition_residuals", named(r.condition_residuals)},
            {"certified", pts},
            {"crosswalk", named(r.crosswalk)},
            {"notes", r.notes}};
}

json to_json(const PhaseEqualReport& r) {
    return {{"phases", r.phases},
            {"extra_crossings", r.extra_crossings},
            {"c", r.c},
            {"c_crosswalk", r.c_crosswalk},
            {"notes", r.notes}};
}

json to_json(const std::vector<FoldPoint>& folds) {
    json arr = json::array();
    for (const auto& f : folds) {
        arr.push_back({{"axis", f.axis_value}, {"count_before", f.count_before}, {"count_after", f.count_after}});
    }
    return arr;
}

json to_json(const std::vector<MultistableInterval>& intervals) {
    json arr = json::array();
    for (const auto& m : intervals) {
        arr.push_back({{"lo", m.lo}, {"hi", m.hi}, {"max_root_count", m.max_root_count}, {"label", m.label}});
    }
    return arr;
}

std::string params_comment(const RunConfig& cfg) {
    const SystemParams& p = cfg.params;
    std::string out = "# params";
    auto add = [&](const char* k, double v) { out += std::string(" ") + k + "=" + format_double(v); };
    add("kappa", p.kappa);
    add("kappa1", p.kappa1);
    add("kappa2", p.kappa2);
    add("delta_a", p.delta_a);
    add("delta", p.delta);
    add("gamma_atom", p.gamma_atom);
    add("g", p.g);
    add("n_atoms", p.n_atoms);
    add("g0", p.g0);
    add("omega_m", p.omega_m);
    add("gamma_m", p.gamma_m);
    add("amp2", cfg.drive.amp2);
    add("phi", cfg.drive.phi);
    out += " regime=" + std::string(to_string(cfg.regime));
    out += std::string(" tie_delta=") + (cfg.tie_delta ? "true" : "false");
    return out;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result, const RunConfig& cfg) {
    out << params_comment(cfg) << " axis=" << to_string(result.spec.axis)
        << " policy=" << to_string(result.spec.policy) << "\n";
    out << "axis,branch,count,x,out1,out2,stable,selected\n";
    for (const auto& rec : result.records) {
        for (std::size_t i = 0; i < rec.branches.size(); ++i) {
            const auto& b = rec.branches[i];
            out << format_double(rec.axis_value) << ',' << i << ',' << rec.branches.size() << ','
                << format_double(b.x) << ',' << format_double(b.outputs.out1) << ','
                << format_double(b.outputs.out2) << ',' << to_string(b.stability) << ',';
            if (rec.selected) out << (*rec.selected == i ? 1 : 0);
            out << '\n';
        }
    }
}

void write_trajectory_csv(std::ostream& out, const std::vector<MeanFieldState>& traj, const RunConfig& cfg) {
    out << params_comment(cfg) << "\n";
    out << "t,re_a,im_a,abs_a2,re_b,im_b,s_z\n";
    for (const auto& s : traj) {
        out << format_double(s.t) << ',' << format_double(s.a.real()) << ',' << format_double(s.a.imag()) << ','
            << format_double(std::norm(s.a)) << ',' << format_double(s.b.real()) << ','
            << format_double(s.b.imag()) << ',' << format_double(s.s_z) << '\n';
    }
}

void write_curve_csv(std::ostream& out, const AbsorptionCurve& curve, const RunConfig& cfg) {
    out << params_comment(cfg) << "\n";
    out << "g2n,amp2,x,certified\n";
    for (const auto& p : curve.points) {
        out << format_double(p.g2n) << ',' << format_double(p.amp2) << ',' << format_double(p.x) << ','
            << (p.certified ? 1 : 0) << '\n';
    }
    for (const auto& o : curve.omitted) out << "# omitted g2n=" << format_double(o.g2n) << ": " << o.reason << '\n';
}

}  // namespace hybridcav
