#include "hybridcav/steady_state.hpp"

#include "hybridcav/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hybridcav {

namespace {
constexpr cplx I{0.0, 1.0};

double saturation(const DerivedQuantities& d, Regime regime, double x) {
    return regime == Regime::FullSaturation ? d.sat_scale * x : 0.0;
}
}  // namespace

std::string_view to_string(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        case Stability::unknown: break;
    }
    return "unknown";
}

cplx denominator(const SystemParams& p, const DerivedQuantities& d, Regime regime, double x) {
    const double inv = 1.0 / (1.0 + saturation(d, regime, x));
    return {p.kappa + d.atom_susc_re * inv, p.delta_a - d.atom_susc_im * inv - d.xi * x};
}

double drive_strength(const SystemParams& p, const DriveConfig& drive) {
    const double k = 2.0 * p.kappa1 + 2.0 * p.kappa2 + 4.0 * std::sqrt(p.kappa1 * p.kappa2) * std::cos(drive.phi);
    return std::max(0.0, k) * drive.amp2;
}

double fixed_point_residual(const SystemParams& p, const DriveConfig& drive, Regime regime, double x) {
    const auto d = derive_quantities(p);
    return x * std::norm(denominator(p, d, regime, x)) - drive_strength(p, drive);
}

double intensity_upper_bound(const SystemParams& p, const DriveConfig& drive) {
    return drive_strength(p, drive) / (p.kappa * p.kappa);
}

Polynomial build_fixed_point_poly(const SystemParams& p, const DriveConfig& drive, Regime regime) {
    const auto d = derive_quantities(p);
    const double k = drive_strength(p, drive);
    if (regime == Regime::LowExcitation) {
        const double re = p.kappa + d.atom_susc_re;
        const double im = p.delta_a - d.atom_susc_im;
        return trimmed(Polynomial{{-k, re * re + im * im, -2.0 * im * d.xi, d.xi * d.xi}});
    }
    const double s = d.sat_scale;
    const cplx kt{p.kappa, p.delta_a};
    const cplx atom{d.atom_susc_re, -d.atom_susc_im};
    const cplx p0 = kt + atom;
    const cplx p1 = s * kt - I * d.xi;
    const cplx p2 = -I * d.xi * s;
    const double m0 = std::norm(p0);
    const double m1 = 2.0 * (p1 * std::conj(p0)).real();
    const double m2 = std::norm(p1) + 2.0 * (p2 * std::conj(p0)).real();
    const double m3 = 2.0 * (p2 * std::conj(p1)).real();
    const double m4 = std::norm(p2);
    return trimmed(Polynomial{{-k, m0 - 2.0 * s * k, m1 - s * s * k, m2, m3, m4}});
}

std::vector<double> physical_roots(std::span<const cplx> roots, const SystemParams& p, const DriveConfig& drive,
                                   Regime regime, const RootTolerances& tol) {
    const double k = drive_strength(p, drive);
    const double bound = intensity_upper_bound(p, drive);
    std::vector<double> xs;
    for (const auto& r : roots) {
        if (std::abs(r.imag()) > tol.imag * (1.0 + std::abs(r.real()))) continue;
        if (r.real() < -tol.imag) continue;
        const double x = std::max(0.0, r.real());
        if (x > bound * (1.0 + 1e-6) + tol.imag) continue;
        xs.push_back(x);
    }
    std::sort(xs.begin(), xs.end());
    std::vector<double> unique;
    for (double x : xs) {
        if (!unique.empty() && std::abs(x - unique.back()) <= tol.dedup * std::max(x, unique.back())) continue;
        unique.push_back(x);
    }
    std::vector<double> out;
    const double limit = tol.resid * std::max(1.0, k);
    for (double x : unique) {
        if (std::abs(fixed_point_residual(p, drive, regime, x)) <= limit) out.push_back(x);
    }
    return out;
}

std::vector<Stability> heuristic_stability(std::size_t root_count) {
    std::vector<Stability> out(root_count, Stability::unknown);
    if (root_count % 2 == 1) {
        for (std::size_t i = 0; i < root_count; ++i) out[i] = (i % 2 == 0) ? Stability::stable : Stability::unstable;
    }
    return out;
}

RootReport solve_steady_states(const SystemParams& p, const DriveConfig& drive, Regime regime,
                               const RootTolerances& tol) {
    RootReport rep;
    rep.polynomial = build_fixed_point_poly(p, drive, regime);
    rep.all_roots = solve_poly(rep.polynomial);
    rep.physical = physical_roots(rep.all_roots, p, drive, regime, tol);
    if (rep.physical.empty()) {
        std::ostringstream msg;
        msg << "no physical steady state at amp2=" << drive.amp2 << " phi=" << drive.phi;
        throw SolverFailure(msg.str());
    }
    const double gate = p.g > 0.0 ? p.gamma_atom * p.gamma_atom / (4.0 * p.g * p.g) : INFINITY;
    for (double x : rep.physical) {
        rep.residuals.push_back(std::abs(fixed_point_residual(p, drive, regime, x)));
        rep.nonlinear_gate.push_back(x > gate);
    }
    for (std::size_t i = 1; i < rep.physical.size(); ++i) {
        const double hi = rep.physical[i];
        if (hi - rep.physical[i - 1] <= tol.fold * hi) rep.near_fold = true;
    }
    rep.stability = heuristic_stability(rep.physical.size());
    return rep;
}

SteadyState reconstruct_state(const SystemParams& p, const DriveConfig& drive, Regime regime, double x) {
    const auto d = derive_quantities(p);
    SteadyState s;
    s.x = x;
    s.a = input_drive(p, drive) / denominator(p, d, regime, x);
    s.b = -I * p.g0 * x / cplx(p.gamma_m, p.omega_m);
    s.s_z = -0.5 * p.n_atoms / (1.0 + saturation(d, regime, x));
    s.s_minus = 2.0 * I * p.g * s.a * s.s_z / cplx(0.5 * p.gamma_atom, p.delta);
    const double mismatch = std::abs(std::norm(s.a) - x);
    // Near-destructive drives leave K at the rounding level of the two-port sum.
    const double port_sum = std::sqrt(2.0 * p.kappa1) + std::sqrt(2.0 * p.kappa2);
    const double floor = 1e-14 * port_sum * port_sum * drive.amp2 / std::norm(denominator(p, d, regime, x));
    if (mismatch > 1e-8 * x + floor + 1e-300) {
        std::ostringstream msg;
        msg << "root x=" << x << " reconstructs |a|^2=" << std::norm(s.a);
        throw SpuriousRoot(msg.str());
    }
    return s;
}

double rhs_residual(const SystemParams& p, const DriveConfig& drive, Regime regime, const MeanFieldState& state) {
    return max_abs_rate(mean_field_rhs(p, drive, regime, state));
}

std::vector<Stability> classify_stability(const SystemParams& p, const DriveConfig& drive, Regime regime,
                                          const RootReport& report, const StabilityOptions& opts) {
    auto labels = heuristic_stability(report.physical.size());
    if (!opts.confirm_with_ode) return labels;

    std::vector<Stability> probed(labels.size(), Stability::unknown);
    bool disagreement = false;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        probed[i] = probe_stability(p, drive, regime, report.physical, i).label;
        if (probed[i] != Stability::unknown && labels[i] != Stability::unknown && probed[i] != labels[i]) {
            disagreement = true;
        }
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (probed[i] != Stability::unknown) {
            labels[i] = probed[i];
        } else if (disagreement) {
            labels[i] = Stability::unknown;
        }
    }
    return labels;
}

}  // namespace hybridcav
