#include "hybridcav/absorption.hpp"

#include "hybridcav/mean_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hybridcav {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(10);
    out << v;
    return out.str();
}

// Port couplings folded into the closed form: a = ain (c1 + c2 e^{i phi}) / D.
struct PortFactors {
    double c1, c2;
};

PortFactors ports(const SystemParams& p) { return {std::sqrt(2.0 * p.kappa1), std::sqrt(2.0 * p.kappa2)}; }

}  // namespace

std::pair<cplx, cplx> output_fields(const SystemParams& p, const DriveConfig& drive, const SteadyState& state) {
    const auto [c1, c2] = ports(p);
    const double amp = std::sqrt(drive.amp2);
    const cplx a1in = amp;
    const cplx a2in = std::polar(amp, drive.phi);
    return {c1 * state.a - a1in, c2 * state.a - a2in};
}

OutputIntensities output_intensities(const SystemParams& p, const DriveConfig& drive, Regime regime, double x) {
    const auto d = derive_quantities(p);
    const auto [c1, c2] = ports(p);
    const cplx e = std::polar(1.0, drive.phi);
    const cplx field = (c1 + c2 * e) / denominator(p, d, regime, x);
    OutputIntensities out;
    out.out1 = std::norm(c1 * field - 1.0);
    out.out2 = std::norm(c2 * field - e);
    out.absorbed_fraction = 1.0 - 0.5 * (out.out1 + out.out2);
    return out;
}

std::optional<CertifiedPoint> certify_operating_point(const SystemParams& p, double amp2, Regime regime,
                                                      const AbsorptionTolerances& tol) {
    if (!(amp2 > 0.0) || !std::isfinite(amp2)) return std::nullopt;
    const DriveConfig drive{amp2, 0.0};
    RootReport rep;
    try {
        rep = solve_steady_states(p, drive, regime);
    } catch (const SolverFailure&) {
        return std::nullopt;
    }
    std::optional<CertifiedPoint> best;
    for (std::size_t i = 0; i < rep.physical.size(); ++i) {
        const double x = rep.physical[i];
        const auto out = output_intensities(p, drive, regime, x);
        if (out.out1 > tol.output || out.out2 > tol.output) continue;
        const double score = std::max(out.out1, out.out2);
        if (best && score >= std::max(best->outputs.out1, best->outputs.out2)) continue;
        best = CertifiedPoint{amp2, x, i, rep.physical.size(), out};
    }
    return best;
}

PerfectAbsorptionReport check_perfect_linear(const SystemParams& p, const AbsorptionTolerances& tol,
                                             double probe_amp2) {
    PerfectAbsorptionReport rep;
    rep.regime = Regime::LowExcitation;
    const auto d = derive_quantities(p);
    const double gam = p.gamma_atom;

    const double re_res = std::abs(p.kappa / gam - 2.0 * d.g2n / (gam * gam + 4.0 * p.delta * p.delta));
    rep.condition_residuals.push_back({"re_condition", re_res});
    const bool re_ok = re_res <= tol.condition;
    if (!re_ok) {
        rep.notes.push_back(p.g == 0.0 || d.g2n == 0.0
                                ? "balance condition unsatisfiable at g=0"
                                : "balance condition Re D = 2 kappa violated by " + fmt(re_res));
    }

    // kappa Gamma / 2 + Da delta - g^2 N = delta Xi x, equivalent to Im D = 0 once Re D = 2 kappa.
    const double lhs = 0.5 * p.kappa * gam + p.delta_a * p.delta - d.g2n;
    const double im_free = p.delta_a - d.atom_susc_im;
    if (d.xi == 0.0) {
        rep.condition_residuals.push_back({"im_condition", std::abs(im_free)});
        if (std::abs(im_free) <= tol.condition) {
            rep.drive_independent = true;
            rep.notes.push_back("Xi = 0 and Im D = 0: absorption holds at every drive");
            if (re_ok) {
                rep.required_amp2.push_back(probe_amp2);
                if (auto pt = certify_operating_point(p, probe_amp2, Regime::LowExcitation, tol)) {
                    rep.required_x = pt->x;
                    rep.certified.push_back(*pt);
                }
            }
        } else {
            rep.notes.push_back("Xi = 0 with Im D = " + fmt(im_free) + " != 0: no intensity-dependent shift");
        }
    } else {
        const double x = im_free / d.xi;
        rep.required_x = x;
        rep.condition_residuals.push_back({"im_condition", std::abs(im_free - d.xi * x)});
        rep.condition_residuals.push_back({"combined_condition", std::abs(lhs - p.delta * d.xi * x)});
        if (!(x > 0.0)) {
            rep.notes.push_back("required intensity " + fmt(x) + " is not positive");
        } else {
            rep.required_amp2.push_back(p.kappa * x);
            if (p.delta != 0.0 && lhs != 0.0) {
                rep.crosswalk.push_back({"amp2_reciprocal_form", p.kappa * p.delta * d.xi / lhs});
                rep.notes.push_back("reciprocal closed form kappa delta Xi / (kappa Gamma/2 + Da delta - g^2 N) = " +
                                    fmt(p.kappa * p.delta * d.xi / lhs) + " differs from kappa x = " +
                                    fmt(p.kappa * x));
            }
            if (re_ok) {
                if (auto pt = certify_operating_point(p, p.kappa * x, Regime::LowExcitation, tol)) {
                    rep.certified.push_back(*pt);
                } else {
                    rep.notes.push_back("no branch with vanishing outputs at amp2 = " + fmt(p.kappa * x));
                }
            }
        }
    }
    rep.feasible = re_ok && !rep.certified.empty();
    return rep;
}

CouplingThreshold coupling_threshold(const SystemParams& p) {
    CouplingThreshold t;
    const double da = p.delta_a;
    const double kg = p.kappa * p.gamma_atom;
    if (da >= 0.0) {
        t.value = 0.5 * kg;
        t.boundary_warning = da == 0.0;
        return t;
    }
    const double da2 = da * da;
    const double radicand = da2 * da2 + 2.0 * kg * da2 - 4.0 * da2;
    if (radicand < 0.0) {
        t.defined = false;
        t.value = std::nan("");
        return t;
    }
    t.value = 0.5 * (da2 + kg + std::sqrt(radicand));
    return t;
}

NonlinearCandidates nonlinear_candidates(const SystemParams& p) {
    NonlinearCandidates c;
    const auto d = derive_quantities(p);
    const double gam = p.gamma_atom;
    if (p.g > 0.0) {
        c.a = (2.0 * d.g2n * gam - p.kappa * gam * gam - 4.0 * p.kappa * p.delta * p.delta) / (8.0 * p.g * p.g);
    }
    if (d.xi > 0.0) {
        c.b = (p.kappa * gam * p.delta_a - 2.0 * p.kappa * p.kappa * p.delta) / (gam * d.xi);
    }
    return c;
}

PerfectAbsorptionReport check_perfect_nonlinear(const SystemParams& p, const AbsorptionTolerances& tol) {
    PerfectAbsorptionReport rep;
    rep.regime = Regime::FullSaturation;
    const auto d = derive_quantities(p);
    const auto cand = nonlinear_candidates(p);
    if (!cand.a) rep.notes.push_back("candidate A skipped: g = 0");
    if (!cand.b) rep.notes.push_back("candidate B skipped: Xi = 0");

    auto evaluate = [&](const std::string& tag, double amp2) {
        rep.required_amp2.push_back(amp2);
        const double x = amp2 / p.kappa;
        const cplx dx = denominator(p, d, Regime::FullSaturation, x);
        const double re_res = std::abs(dx.real() - 2.0 * p.kappa);
        const double im_res = std::abs(dx.imag());
        const double sat = 1.0 + d.sat_scale * x;
        const double lhs = 0.5 * p.kappa * p.gamma_atom + p.delta_a * p.delta;
        const double combined = std::abs(lhs - d.g2n / sat - p.delta * d.xi * x);
        rep.condition_residuals.push_back({tag + ".re_condition", re_res});
        rep.condition_residuals.push_back({tag + ".im_condition", im_res});
        rep.condition_residuals.push_back({tag + ".combined_condition", combined});
        rep.crosswalk.push_back({tag + ".combined_condition_doubled", std::abs(lhs - d.g2n / sat - 2.0 * p.delta * d.xi * x)});
        if (!(amp2 > 0.0)) {
            rep.notes.push_back("candidate " + tag + " = " + fmt(amp2) + " is not positive");
            return;
        }
        if (re_res > tol.condition || im_res > tol.condition) {
            rep.notes.push_back("candidate " + tag + " = " + fmt(amp2) + " leaves D - 2 kappa = (" + fmt(re_res) + ", " +
                                fmt(dx.imag()) + ")");
        }
        if (auto pt = certify_operating_point(p, amp2, Regime::FullSaturation, tol)) {
            if (re_res <= tol.condition && im_res <= tol.condition) {
                rep.certified.push_back(*pt);
                if (!rep.required_x) rep.required_x = pt->x;
            }
        } else {
            rep.notes.push_back("candidate " + tag + ": no branch with vanishing outputs");
        }
    };
    if (cand.a) evaluate("A", *cand.a);
    if (cand.b) evaluate("B", *cand.b);
    rep.feasible = !rep.certified.empty();
    return rep;
}

PhaseEqualReport phase_equal_output(const SystemParams& p, double amp2, const PhaseScanOptions& opts) {
    PhaseEqualReport rep;
    const auto d = derive_quantities(p);
    const Regime regime = Regime::LowExcitation;

    // Up-sweep branch from zero drive: the lowest physical root of the cubic.
    auto diff = [&](double phi) {
        const DriveConfig drive{amp2, phi};
        const auto roots = solve_steady_states(p, drive, regime).physical;
        const auto out = output_intensities(p, drive, regime, roots.front());
        return out.out1 - out.out2;
    };

    const std::size_t n = std::max<std::size_t>(opts.points, 8);
    std::vector<double> grid(n), values(n);
    for (std::size_t i = 0; i < n; ++i) {
        grid[i] = two_pi * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        values[i] = diff(grid[i]);
    }

    std::vector<double> phases{0.0, std::numbers::pi};
    auto near_known = [&](double phi) {
        for (double q : phases) {
            const double dist = std::abs(phi - q);
            if (std::min(dist, two_pi - dist) < 4.0 * two_pi / static_cast<double>(n)) return true;
        }
        return false;
    };
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if ((values[i] < 0.0) == (values[i + 1] < 0.0)) continue;
        double lo = grid[i], hi = grid[i + 1], flo = values[i];
        for (int it = 0; it < 100 && hi - lo > 1e-14; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = diff(mid);
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        const double phi = 0.5 * (lo + hi);
        if (near_known(phi)) continue;
        // A sign change can come from the branch jumping at a fold rather than a crossing.
        if (std::abs(diff(phi)) > opts.match_tol) {
            rep.notes.push_back("rejected branch jump near phi = " + fmt(phi));
            continue;
        }
        phases.push_back(phi);
    }
    std::sort(phases.begin(), phases.end());
    rep.phases = phases;
    rep.extra_crossings = phases.size() > 2;

    const double r = p.kappa + d.atom_susc_re;
    if (d.xi > 0.0 && amp2 > 0.0) {
        const double xc = (p.delta_a - d.atom_susc_im) / d.xi;
        rep.c = xc > 0.0 ? xc * r * r / (2.0 * p.kappa * amp2) - 1.0 : std::nan("");
    } else {
        rep.c = std::nan("");
    }
    if (d.xi > 0.0 && p.delta != 0.0 && amp2 > 0.0) {
        const double lhs = 0.5 * p.kappa * p.gamma_atom + p.delta * p.delta_a - d.g2n;
        rep.c_crosswalk = r * r * lhs / (2.0 * p.kappa * d.xi * p.delta * p.delta * amp2) - 1.0;
    } else {
        rep.c_crosswalk = std::nan("");
    }
    if (!(std::abs(rep.c) <= 1.0)) rep.notes.push_back("|c| > 1: no crossing with Im D = 0");
    return rep;
}

}  // namespace hybridcav
