#include "hybridcav/sweep.hpp"

#include "hybridcav/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace hybridcav {

std::string_view to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::drive_amp2: return "drive_amp2";
        case SweepAxis::phase: return "phase";
        case SweepAxis::coupling_g2n: return "coupling_g2n";
        case SweepAxis::detuning_delta_a: break;
    }
    return "detuning_delta_a";
}

std::string_view to_string(Spacing s) { return s == Spacing::linear ? "linear" : "log"; }

std::string_view to_string(BranchPolicy b) {
    switch (b) {
        case BranchPolicy::all: return "all";
        case BranchPolicy::up_sweep: return "up";
        case BranchPolicy::down_sweep: break;
    }
    return "down";
}

SweepAxis parse_axis(std::string_view s) {
    if (s == "drive_amp2" || s == "amp2" || s == "drive") return SweepAxis::drive_amp2;
    if (s == "phase" || s == "phi") return SweepAxis::phase;
    if (s == "coupling_g2n" || s == "g2n") return SweepAxis::coupling_g2n;
    if (s == "detuning_delta_a" || s == "delta_a") return SweepAxis::detuning_delta_a;
    throw std::invalid_argument("unknown sweep axis '" + std::string(s) + "'");
}

Spacing parse_spacing(std::string_view s) {
    if (s == "linear") return Spacing::linear;
    if (s == "log") return Spacing::log;
    throw std::invalid_argument("unknown spacing '" + std::string(s) + "'");
}

BranchPolicy parse_policy(std::string_view s) {
    if (s == "all") return BranchPolicy::all;
    if (s == "up" || s == "up_sweep") return BranchPolicy::up_sweep;
    if (s == "down" || s == "down_sweep") return BranchPolicy::down_sweep;
    throw std::invalid_argument("unknown branch policy '" + std::string(s) + "'");
}

std::vector<std::string> validate(const SweepSpec& spec) {
    std::vector<std::string> out;
    if (!std::isfinite(spec.lo) || !std::isfinite(spec.hi) || !(spec.lo < spec.hi)) out.push_back("sweep needs lo < hi");
    if (spec.points < 2) out.push_back("sweep needs at least 2 points");
    if (spec.spacing == Spacing::log && !(spec.lo > 0.0)) out.push_back("log spacing needs lo > 0");
    if (spec.axis == SweepAxis::drive_amp2 && spec.lo < 0.0) out.push_back("drive sweep needs lo >= 0");
    if (spec.axis == SweepAxis::coupling_g2n && spec.lo < 0.0) out.push_back("coupling sweep needs lo >= 0");
    return out;
}

std::vector<double> axis_values(const SweepSpec& spec) {
    std::vector<double> v(spec.points);
    const double last = static_cast<double>(spec.points - 1);
    for (std::size_t i = 0; i < spec.points; ++i) {
        const double t = static_cast<double>(i) / last;
        if (spec.spacing == Spacing::linear) {
            v[i] = spec.lo + (spec.hi - spec.lo) * t;
        } else {
            v[i] = std::exp(std::log(spec.lo) + (std::log(spec.hi) - std::log(spec.lo)) * t);
        }
    }
    v.front() = spec.lo;
    v.back() = spec.hi;
    return v;
}

std::pair<SystemParams, DriveConfig> apply_axis(const SystemParams& p, const DriveConfig& drive,
                                                const SweepSpec& spec, double value) {
    SystemParams q = p;
    DriveConfig d = drive;
    switch (spec.axis) {
        case SweepAxis::drive_amp2: d.amp2 = value; break;
        case SweepAxis::phase: d.phi = normalize_phase(value); break;
        case SweepAxis::coupling_g2n: q = with_g2n(p, value, spec.tie_delta); break;
        case SweepAxis::detuning_delta_a: q.delta_a = value; break;
    }
    return {q, d};
}

namespace {

SweepRecord solve_point(const SystemParams& p, const DriveConfig& drive, const SweepSpec& spec, double value) {
    SweepRecord rec;
    rec.axis_value = value;
    try {
        auto [q, d] = apply_axis(p, drive, spec, value);
        RootReport rep = solve_steady_states(q, d, spec.regime);
        if (rep.physical.size() % 2 == 0 && d.amp2 > 0.0) {
            d.amp2 *= 1.0 + 1e-9;
            rep = solve_steady_states(q, d, spec.regime);
            rec.jittered = true;
        }
        const auto labels = classify_stability(q, d, spec.regime, rep, {spec.confirm_stability});
        for (std::size_t i = 0; i < rep.physical.size(); ++i) {
            rec.branches.push_back({rep.physical[i], output_intensities(q, d, spec.regime, rep.physical[i]), labels[i]});
        }
    } catch (const std::exception& e) {
        std::ostringstream msg;
        msg << to_string(spec.axis) << "=" << value << ": " << e.what();
        throw SweepFailure(msg.str(), value);
    }
    return rec;
}

std::vector<SweepRecord> solve_all(const SystemParams& p, const DriveConfig& drive, const SweepSpec& spec,
                                   const std::vector<double>& values) {
    std::vector<SweepRecord> out(values.size());
    std::size_t threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, std::max<std::size_t>(1, values.size() / 64));
    if (threads <= 1) {
        for (std::size_t i = 0; i < values.size(); ++i) out[i] = solve_point(p, drive, spec, values[i]);
        return out;
    }
    std::mutex mu;
    std::size_t failed_index = values.size();
    std::exception_ptr failure;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < values.size(); i += threads) {
                try {
                    out[i] = solve_point(p, drive, spec, values[i]);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (i < failed_index) {
                        failed_index = i;
                        failure = std::current_exception();
                    }
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    // Each worker stops at its first failure, so failed_index is the lowest one.
    if (failure) std::rethrow_exception(failure);
    return out;
}

std::size_t count_at(const SystemParams& p, const DriveConfig& drive, const SweepSpec& spec, double value) {
    try {
        auto [q, d] = apply_axis(p, drive, spec, value);
        auto n = solve_steady_states(q, d, spec.regime).physical.size();
        if (n % 2 == 0 && d.amp2 > 0.0) {
            d.amp2 *= 1.0 + 1e-9;
            n = solve_steady_states(q, d, spec.regime).physical.size();
        }
        return n;
    } catch (const std::exception& e) {
        throw SweepFailure(e.what(), value);
    }
}

std::vector<FoldPoint> locate_folds(const SystemParams& p, const DriveConfig& drive, const SweepSpec& spec,
                                    const std::vector<SweepRecord>& recs) {
    std::vector<FoldPoint> folds;
    for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
        const std::size_t c0 = recs[i].branches.size();
        const std::size_t c1 = recs[i + 1].branches.size();
        if (c0 == c1) continue;
        double lo = recs[i].axis_value, hi = recs[i + 1].axis_value;
        for (int it = 0; it < 60 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++it) {
            const double mid = 0.5 * (lo + hi);
            if (count_at(p, drive, spec, mid) == c0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        folds.push_back({0.5 * (lo + hi), c0, c1});
    }
    return folds;
}

std::size_t nearest(const SweepRecord& rec, double x) {
    std::size_t best = 0;
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < rec.branches.size(); ++j) {
        const double dd = std::abs(rec.branches[j].x - x);
        if (dd < dist) {
            dist = dd;
            best = j;
        }
    }
    return best;
}

}  // namespace

void select_branches(SweepResult& result, BranchPolicy policy) {
    result.spec.policy = policy;
    auto& recs = result.records;
    for (auto& r : recs) r.selected.reset();
    if (policy == BranchPolicy::all || recs.empty()) return;
    if (policy == BranchPolicy::up_sweep) {
        recs.front().selected = 0;
        for (std::size_t i = 1; i < recs.size(); ++i) {
            recs[i].selected = nearest(recs[i], recs[i - 1].branches[*recs[i - 1].selected].x);
        }
    } else {
        recs.back().selected = recs.back().branches.size() - 1;
        for (std::size_t i = recs.size() - 1; i-- > 0;) {
            recs[i].selected = nearest(recs[i], recs[i + 1].branches[*recs[i + 1].selected].x);
        }
    }
}

SweepResult run_sweep(const SystemParams& p, const DriveConfig& drive, const SweepSpec& spec) {
    const auto problems = validate(spec);
    if (!problems.empty()) throw std::invalid_argument(problems.front());
    SweepResult res;
    res.spec = spec;
    const auto values = axis_values(spec);
    res.records = solve_all(p, drive, spec, values);

    if (spec.refine_folds) {
        std::vector<double> extra;
        for (std::size_t i = 0; i + 1 < res.records.size(); ++i) {
            if (res.records[i].branches.size() == res.records[i + 1].branches.size()) continue;
            const double lo = values[i], hi = values[i + 1];
            for (int k = 1; k < 4; ++k) extra.push_back(lo + (hi - lo) * k / 4.0);
        }
        if (!extra.empty()) {
            auto more = solve_all(p, drive, spec, extra);
            res.records.insert(res.records.end(), std::make_move_iterator(more.begin()),
                               std::make_move_iterator(more.end()));
            std::stable_sort(res.records.begin(), res.records.end(),
                             [](const SweepRecord& a, const SweepRecord& b) { return a.axis_value < b.axis_value; });
        }
    }
    res.folds = locate_folds(p, drive, spec, res.records);
    select_branches(res, spec.policy);
    return res;
}

std::pair<SweepResult, SweepResult> hysteresis_loop(const SystemParams& p, const DriveConfig& drive, SweepSpec spec) {
    if (spec.axis != SweepAxis::drive_amp2) throw std::invalid_argument("hysteresis loop needs the drive axis");
    spec.policy = BranchPolicy::up_sweep;
    SweepResult up = run_sweep(p, drive, spec);
    SweepResult down = up;
    select_branches(down, BranchPolicy::down_sweep);
    return {std::move(up), std::move(down)};
}

std::vector<MultistableInterval> detect_multistability(const SweepResult& result) {
    std::vector<MultistableInterval> out;
    const auto& recs = result.records;
    std::size_t i = 0;
    while (i < recs.size()) {
        const std::size_t c = recs[i].branches.size();
        std::size_t j = i;
        while (j + 1 < recs.size() && recs[j + 1].branches.size() == c) ++j;
        if (c >= 3) {
            out.push_back({recs[i].axis_value, recs[j].axis_value, c, c >= 5 ? "multistable" : "bistable"});
        }
        i = j + 1;
    }
    return out;
}

std::vector<std::pair<double, double>> selection_jumps(const SweepResult& result) {
    std::vector<std::pair<double, double>> out;
    const auto& recs = result.records;
    for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
        if (!recs[i].selected || !recs[i + 1].selected) continue;
        if (recs[i].branches.size() == recs[i + 1].branches.size()) continue;
        const double x0 = recs[i].branches[*recs[i].selected].x;
        const double x1 = recs[i + 1].branches[*recs[i + 1].selected].x;
        if (std::abs(x1 - x0) > 0.1 * std::max(x0, x1)) out.emplace_back(recs[i].axis_value, recs[i + 1].axis_value);
    }
    return out;
}

AbsorptionCurve input_for_absorption_curve(const SystemParams& p, double g2n_lo, double g2n_hi, std::size_t points) {
    AbsorptionCurve curve;
    SweepSpec spec;
    spec.lo = g2n_lo;
    spec.hi = g2n_hi;
    spec.points = points;
    for (double g2n : axis_values(spec)) {
        if (g2n < p.kappa * p.kappa) {
            curve.omitted.push_back({g2n, "tied detuning needs g2n >= kappa^2"});
            continue;
        }
        const SystemParams q = with_g2n(p, g2n, true);
        const auto thr = coupling_threshold(q);
        if (thr.defined && g2n <= thr.value) {
            std::ostringstream msg;
            msg << "below coupling threshold " << thr.value;
            curve.omitted.push_back({g2n, msg.str()});
            continue;
        }
        const auto rep = check_perfect_linear(q);
        if (!rep.required_x || rep.required_amp2.empty()) {
            curve.omitted.push_back({g2n, rep.notes.empty() ? "no perfect-absorption drive" : rep.notes.front()});
            continue;
        }
        curve.points.push_back({g2n, rep.required_amp2.front(), *rep.required_x, rep.feasible});
    }
    return curve;
}

const std::vector<std::string>& figure_names() {
    static const std::vector<std::string> names{"fig2", "fig3", "fig5a", "fig5b", "fig6a", "fig6b"};
    return names;
}

FigureSweep figure_sweep(std::string_view name) {
    FigureSweep f;
    f.name = std::string(name);
    SweepSpec& s = f.spec;
    if (name == "fig2") {
        f.preset = preset(PresetName::fig2);
        s.axis = SweepAxis::coupling_g2n;
        s.lo = 1.0;
        s.hi = 100.0;
        s.tie_delta = true;
    } else if (name == "fig3") {
        f.preset = preset(PresetName::fig3);
        s.lo = 0.0;
        s.hi = 500.0;
    } else if (name == "fig5a" || name == "fig5b") {
        f.preset = preset(name == "fig5a" ? PresetName::fig5a : PresetName::fig5b);
        s.axis = SweepAxis::phase;
        s.lo = 0.0;
        s.hi = 2.0 * std::numbers::pi;
        s.policy = BranchPolicy::up_sweep;
    } else if (name == "fig6a" || name == "fig6b") {
        f.preset = preset(name == "fig6a" ? PresetName::fig6a : PresetName::fig6b);
        s.lo = 0.0;
        s.hi = 20000.0;
    } else {
        throw std::invalid_argument("unknown figure '" + std::string(name) + "'");
    }
    s.regime = f.preset.regime;
    f.drive = f.preset.drive;
    return f;
}

}  // namespace hybridcav
