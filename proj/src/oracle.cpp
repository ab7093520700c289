#include "hybridcav/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

namespace hybridcav {

namespace {

MeanFieldState advance(const MeanFieldState& s, const MeanFieldRates& r, double h) {
    MeanFieldState out = s;
    out.a += h * r.da;
    out.b += h * r.db;
    out.s_minus += h * r.ds_minus;
    out.s_z += h * r.ds_z;
    return out;
}

bool finite(const MeanFieldState& s) {
    return std::isfinite(s.a.real()) && std::isfinite(s.a.imag()) && std::isfinite(s.b.real()) &&
           std::isfinite(s.b.imag()) && std::isfinite(s.s_minus.real()) && std::isfinite(s.s_minus.imag()) &&
           std::isfinite(s.s_z);
}

// RK4 step that also hands back the rate at the start of the step.
MeanFieldState step_with_rate(const SystemParams& p, const DriveConfig& drive, Regime regime,
                              const MeanFieldState& s, double dt, MeanFieldRates& k1) {
    k1 = mean_field_rhs(p, drive, regime, s);
    const auto k2 = mean_field_rhs(p, drive, regime, advance(s, k1, 0.5 * dt));
    const auto k3 = mean_field_rhs(p, drive, regime, advance(s, k2, 0.5 * dt));
    const auto k4 = mean_field_rhs(p, drive, regime, advance(s, k3, dt));
    MeanFieldState out = s;
    const double w = dt / 6.0;
    out.a += w * (k1.da + 2.0 * k2.da + 2.0 * k3.da + k4.da);
    out.b += w * (k1.db + 2.0 * k2.db + 2.0 * k3.db + k4.db);
    out.s_minus += w * (k1.ds_minus + 2.0 * k2.ds_minus + 2.0 * k3.ds_minus + k4.ds_minus);
    out.s_z += w * (k1.ds_z + 2.0 * k2.ds_z + 2.0 * k3.ds_z + k4.ds_z);
    out.t = s.t + dt;
    return out;
}

void check_config(const SystemParams& p, const IntegrationConfig& cfg) {
    if (!integration_config_valid(p, cfg)) {
        std::ostringstream msg;
        msg << "integration step dt=" << cfg.dt << " violates the stability guard";
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace

double max_rate(const SystemParams& p, double x_scale) {
    const auto d = derive_quantities(p);
    const double x = std::max(0.0, x_scale);
    return std::max({p.kappa, p.gamma_atom, p.omega_m, p.gamma_m, std::abs(p.delta_a), std::abs(p.delta),
                     std::sqrt(d.g2n), d.xi * x, 2.0 * p.g0 * std::sqrt(x), 2.0 * p.g * std::sqrt(x)});
}

double min_decay_rate(const SystemParams& p) {
    double r = std::min(p.kappa, 0.5 * p.gamma_atom);
    if (p.g0 > 0.0 && p.gamma_m > 0.0) r = std::min(r, p.gamma_m);
    return r;
}

IntegrationConfig default_integration(const SystemParams& p, double x_scale) {
    IntegrationConfig cfg;
    cfg.dt = 0.01 / max_rate(p, x_scale);
    cfg.t_max = 400.0 / min_decay_rate(p);
    return cfg;
}

bool integration_config_valid(const SystemParams& p, const IntegrationConfig& cfg) {
    if (!(cfg.dt > 0.0) || !(cfg.t_max >= 0.0) || cfg.stride == 0) return false;
    const double fastest = std::max({p.gamma_atom, p.kappa, p.omega_m, std::sqrt(p.g2n())});
    return cfg.dt * fastest <= 0.1;
}

MeanFieldState rk4_step(const SystemParams& p, const DriveConfig& drive, Regime regime, const MeanFieldState& s,
                        double dt) {
    MeanFieldRates k1;
    return step_with_rate(p, drive, regime, s, dt, k1);
}

std::vector<MeanFieldState> integrate(const SystemParams& p, const DriveConfig& drive, Regime regime,
                                      const MeanFieldState& init, const IntegrationConfig& cfg) {
    check_config(p, cfg);
    std::vector<MeanFieldState> traj{init};
    const auto steps = static_cast<std::size_t>(std::ceil(cfg.t_max / cfg.dt - 1e-9));
    MeanFieldState s = init;
    MeanFieldRates k1;
    for (std::size_t i = 1; i <= steps; ++i) {
        MeanFieldState next = step_with_rate(p, drive, regime, s, cfg.dt, k1);
        next.t = init.t + static_cast<double>(i) * cfg.dt;
        if (!finite(next)) throw DivergenceError("mean-field integration diverged", s.t);
        s = next;
        if (i % cfg.stride == 0 || i == steps) traj.push_back(s);
    }
    return traj;
}

SettleResult settle(const SystemParams& p, const DriveConfig& drive, Regime regime, const MeanFieldState& init,
                    const IntegrationConfig& cfg) {
    check_config(p, cfg);
    SettleResult res;
    MeanFieldState s = init;

    // Window long enough to hold two mechanical periods and many decay times.
    const double window = std::max(4.0 * std::numbers::pi / p.omega_m, 20.0 / min_decay_rate(p));
    const auto window_steps = std::max<std::size_t>(16, static_cast<std::size_t>(window / cfg.dt));
    struct WindowStats {
        double x_min, x_max, x_sum, rate_min;
    };
    std::vector<WindowStats> windows;
    WindowStats cur{INFINITY, -INFINITY, 0.0, INFINITY};
    std::size_t in_window = 0;

    const auto steps = static_cast<std::size_t>(std::ceil(cfg.t_max / cfg.dt - 1e-9));
    MeanFieldRates k1;
    for (std::size_t i = 0; i < steps; ++i) {
        MeanFieldState next = step_with_rate(p, drive, regime, s, cfg.dt, k1);
        const double norm = scaled_rate_norm(p, s, k1);
        if (norm < cfg.settle_tol) {
            res.status = SettleStatus::converged;
            res.state = s;
            res.rate_norm = norm;
            return res;
        }
        if (!finite(next)) throw DivergenceError("mean-field integration diverged", s.t);
        next.t = init.t + static_cast<double>(i + 1) * cfg.dt;

        const double x = std::norm(s.a);
        cur.x_min = std::min(cur.x_min, x);
        cur.x_max = std::max(cur.x_max, x);
        cur.x_sum += x;
        cur.rate_min = std::min(cur.rate_min, norm);
        if (++in_window == window_steps) {
            windows.push_back(cur);
            cur = {INFINITY, -INFINITY, 0.0, INFINITY};
            in_window = 0;
            if (windows.size() >= 3) {
                const auto& last = windows[windows.size() - 1];
                const auto& prev = windows[windows.size() - 2];
                const double mean = last.x_sum / static_cast<double>(window_steps);
                const double amp_last = (last.x_max - last.x_min) / std::max(mean, 1e-300);
                const double amp_prev = (prev.x_max - prev.x_min) / std::max(mean, 1e-300);
                const bool oscillating = amp_last > 1e-6;
                const bool steady_amplitude = std::abs(amp_last - amp_prev) <= 0.05 * amp_last;
                const bool not_decaying = last.rate_min >= 0.5 * prev.rate_min;
                if (oscillating && steady_amplitude && not_decaying) {
                    res.status = SettleStatus::limit_cycle;
                    res.state = next;
                    res.rate_norm = norm;
                    return res;
                }
            }
        }
        s = next;
    }
    res.status = SettleStatus::not_converged;
    res.state = s;
    res.rate_norm = scaled_rate_norm(p, s, mean_field_rhs(p, drive, regime, s));
    return res;
}

ProbeResult probe_stability(const SystemParams& p, const DriveConfig& drive, Regime regime,
                            const std::vector<double>& roots, std::size_t index) {
    const double x_scale = roots.empty() ? 0.0 : roots.back();
    return probe_stability(p, drive, regime, roots, index, default_integration(p, 1.1 * x_scale));
}

ProbeResult probe_stability(const SystemParams& p, const DriveConfig& drive, Regime regime,
                            const std::vector<double>& roots, std::size_t index, const IntegrationConfig& cfg) {
    ProbeResult out;
    const double x0 = roots.at(index);
    if (x0 == 0.0) {
        // Zero drive: the empty cavity relaxes at the bare decay rates.
        out.label = drive_strength(p, drive) == 0.0 ? Stability::stable : Stability::unknown;
        return out;
    }
    double eps = 0.01;
    for (std::size_t j = 0; j < roots.size(); ++j) {
        if (j == index) continue;
        eps = std::min(eps, 0.25 * std::abs(roots[j] - x0) / x0);
    }
    out.epsilon = eps;

    const SteadyState base = reconstruct_state(p, drive, regime, x0);
    bool all_back = true;
    bool any_away = false;
    for (double sign : {+1.0, -1.0}) {
        MeanFieldState init = base.as_mean_field();
        init.a *= std::sqrt(1.0 + sign * eps);
        SettleResult r;
        try {
            r = settle(p, drive, regime, init, cfg);
        } catch (const DivergenceError&) {
            r.status = SettleStatus::limit_cycle;
        }
        out.runs.push_back(r);
        if (r.status == SettleStatus::limit_cycle) {
            any_away = true;
            all_back = false;
            continue;
        }
        if (r.status != SettleStatus::converged) {
            all_back = false;
            continue;
        }
        const double xs = std::norm(r.state.a);
        out.settled_x.push_back(xs);
        if (std::abs(xs - x0) <= 1e-5 * x0) continue;
        all_back = false;
        any_away = true;
    }
    if (any_away) {
        out.label = Stability::unstable;
    } else if (all_back) {
        out.label = Stability::stable;
    }
    return out;
}

GridScanSpec default_grid(const SystemParams& p, const DriveConfig& drive) {
    GridScanSpec g;
    g.x_max = intensity_upper_bound(p, drive) * (1.0 + 1e-9);
    g.step = 1e-3;
    return g;
}

std::vector<Bracket> residual_grid_scan(const SystemParams& p, const DriveConfig& drive, Regime regime,
                                        const GridScanSpec& spec) {
    const auto d = derive_quantities(p);
    const double k = drive_strength(p, drive);
    auto f = [&](double x) {
        const double inv = 1.0 / (1.0 + (regime == Regime::FullSaturation ? d.sat_scale * x : 0.0));
        const double re = p.kappa + d.atom_susc_re * inv;
        const double im = p.delta_a - d.atom_susc_im * inv - d.xi * x;
        return x * (re * re + im * im) - k;
    };

    std::vector<Bracket> out;
    if (k == 0.0) {
        out.push_back({0.0, 0.0, 0.0});
        return out;
    }

    std::size_t n = 0;
    std::function<double(std::size_t)> grid;
    if (spec.points > 1) {
        n = spec.points - 1;
        const double x_lo = spec.x_max * 1e-12;
        const double ratio = std::log(spec.x_max / x_lo);
        grid = [=](std::size_t i) {
            if (i == 0) return 0.0;
            if (i == n) return spec.x_max;
            return x_lo * std::exp(ratio * static_cast<double>(i - 1) / static_cast<double>(n - 1));
        };
    } else {
        n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(spec.x_max / spec.step)));
        grid = [=](std::size_t i) { return spec.x_max * static_cast<double>(i) / static_cast<double>(n); };
    }

    auto refine = [&](double lo, double hi, double flo) {
        for (int it = 0; it < 400 && (hi - lo) > spec.refine_tol * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = f(mid);
            if (fm == 0.0) return Bracket{mid, mid, mid};
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        return Bracket{lo, hi, 0.5 * (lo + hi)};
    };

    double x_prev = grid(0);
    double f_prev = f(x_prev);
    for (std::size_t i = 1; i <= n; ++i) {
        const double x = grid(i);
        const double fx = f(x);
        if (fx == 0.0) {
            out.push_back({x, x, x});
            continue;  // keep the last nonzero sample as the reference sign
        }
        if (f_prev != 0.0 && (fx < 0.0) != (f_prev < 0.0)) out.push_back(refine(x_prev, x, f_prev));
        x_prev = x;
        f_prev = fx;
    }
    return out;
}

}  // namespace hybridcav
