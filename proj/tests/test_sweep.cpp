#include "hybridcav/sweep.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace hybridcav;

namespace {

SweepSpec drive_spec(double lo, double hi, std::size_t points, Regime regime) {
    SweepSpec s;
    s.axis = SweepAxis::drive_amp2;
    s.lo = lo;
    s.hi = hi;
    s.points = points;
    s.regime = regime;
    return s;
}

std::vector<std::size_t> count_sequence(const SweepResult& r) {
    std::vector<std::size_t> seq;
    for (const auto& rec : r.records)
        if (seq.empty() || seq.back() != rec.branches.size()) seq.push_back(rec.branches.size());
    return seq;
}

double selected_x(const SweepRecord& r) { return r.branches[*r.selected].x; }

}  // namespace

TEST_CASE("axis values and spec validation") {
    SweepSpec s;
    s.lo = 0.1;
    s.hi = 0.7;
    s.points = 7;
    const auto v = axis_values(s);
    REQUIRE(v.size() == 7);
    CHECK(v.front() == 0.1);
    CHECK(v.back() == 0.7);
    CHECK(v[3] == doctest::Approx(0.4).epsilon(1e-15));

    s.spacing = Spacing::log;
    s.lo = 1.0;
    s.hi = 1e4;
    s.points = 5;
    const auto g = axis_values(s);
    CHECK(g[2] == doctest::Approx(100.0).epsilon(1e-13));
    CHECK(g.back() == 1e4);
    CHECK(validate(s).empty());

    s.lo = 0.0;
    CHECK(validate(s) == std::vector<std::string>{"log spacing needs lo > 0"});
    SweepSpec bad;
    bad.lo = 2.0;
    bad.hi = 1.0;
    bad.points = 1;
    CHECK(validate(bad).size() == 2);
    CHECK_THROWS_AS(static_cast<void>(run_sweep(preset(PresetName::fig3).params, {}, bad)), std::invalid_argument);

    CHECK(parse_axis(to_string(SweepAxis::coupling_g2n)) == SweepAxis::coupling_g2n);
    CHECK(parse_policy("up") == BranchPolicy::up_sweep);
    CHECK(parse_policy("down") == BranchPolicy::down_sweep);
    CHECK(parse_spacing("log") == Spacing::log);
    CHECK_THROWS(static_cast<void>(parse_axis("time")));
}

TEST_CASE("bistable drive sweep opens and closes one window") {
    const Preset pr = preset(PresetName::fig3);
    const SweepResult r = run_sweep(pr.params, pr.drive, drive_spec(0.0, 500.0, 1000, pr.regime));
    CHECK(count_sequence(r) == std::vector<std::size_t>{1, 3, 1});
    REQUIRE(r.folds.size() == 2);
    CHECK(r.folds[0].count_before == 1);
    CHECK(r.folds[0].count_after == 3);
    CHECK(r.folds[0].axis_value == doctest::Approx(238.727).epsilon(1e-5));
    CHECK(r.folds[1].axis_value == doctest::Approx(321.399).epsilon(1e-5));
    for (std::size_t i = 1; i < r.records.size(); ++i) CHECK(r.records[i - 1].axis_value < r.records[i].axis_value);
    for (const auto& rec : r.records) {
        CHECK_FALSE(rec.selected.has_value());
        for (std::size_t j = 1; j < rec.branches.size(); ++j) CHECK(rec.branches[j - 1].x < rec.branches[j].x);
    }

    const auto ms = detect_multistability(r);
    REQUIRE(ms.size() == 1);
    CHECK(ms[0].label == "bistable");
    CHECK(ms[0].lo >= r.folds[0].axis_value);
    CHECK(ms[0].hi <= r.folds[1].axis_value);
}

TEST_CASE("hysteresis loop") {
    const Preset pr = preset(PresetName::fig3);
    const auto [up, down] = hysteresis_loop(pr.params, pr.drive, drive_spec(0.0, 500.0, 1000, pr.regime));
    REQUIRE(up.records.size() == down.records.size());

    const auto up_jumps = selection_jumps(up);
    const auto down_jumps = selection_jumps(down);
    REQUIRE(up_jumps.size() == 1);
    REQUIRE(down_jumps.size() == 1);
    // The up sweep leaves the lower branch at the upper fold, the down sweep at the lower one.
    CHECK(up_jumps[0].first == doctest::Approx(up.folds[1].axis_value).epsilon(1e-2));
    CHECK(down_jumps[0].second == doctest::Approx(up.folds[0].axis_value).epsilon(1e-2));
    CHECK(up_jumps[0].first > down_jumps[0].first);

    for (std::size_t i = 0; i < up.records.size(); ++i) {
        if (up.records[i].branches.size() == 1) CHECK(selected_x(up.records[i]) == selected_x(down.records[i]));
    }

    SystemParams mono = pr.params;
    mono.g0 = 0.0;
    const auto [u, d] = hysteresis_loop(mono, pr.drive, drive_spec(0.0, 500.0, 200, pr.regime));
    for (std::size_t i = 0; i < u.records.size(); ++i) CHECK(selected_x(u.records[i]) == selected_x(d.records[i]));
    CHECK(selection_jumps(u).empty());

    const auto [dark, dark_down] = hysteresis_loop(pr.params, {0.0, std::numbers::pi},
                                                   drive_spec(0.0, 500.0, 200, pr.regime));
    for (const auto& rec : dark.records) CHECK(selected_x(rec) == 0.0);

    SweepSpec phase;
    phase.axis = SweepAxis::phase;
    CHECK_THROWS_AS(static_cast<void>(hysteresis_loop(pr.params, pr.drive, phase)), std::invalid_argument);
}

TEST_CASE("five-root window is reported as multistable") {
    SystemParams p = preset(PresetName::fig6a).params;
    p.n_atoms = 600.0 / (p.g * p.g);
    const SweepResult r = run_sweep(p, {}, drive_spec(0.0, 20000.0, 2000, Regime::FullSaturation));
    const auto seq = count_sequence(r);
    CHECK(std::find(seq.begin(), seq.end(), 5u) != seq.end());
    const auto ms = detect_multistability(r);
    bool multi = false;
    for (const auto& m : ms) {
        if (m.max_root_count == 5) {
            multi = true;
            CHECK(m.label == "multistable");
            CHECK(m.lo == doctest::Approx(4561.2).epsilon(1e-3));
            CHECK(m.hi == doctest::Approx(13871.9).epsilon(1e-3));
        }
    }
    CHECK(multi);
    REQUIRE(r.folds.size() == 3);
    CHECK(r.folds[1].count_after == 5);
    CHECK(r.folds[2].count_before == 5);
}

TEST_CASE("coupling sweep") {
    const Preset pr = preset(PresetName::fig3);
    SweepSpec s;
    s.axis = SweepAxis::coupling_g2n;
    s.lo = 1.0;
    s.hi = 200.0;
    s.points = 300;
    DriveConfig weak{1e-3, 0.0}, strong{250.0, 0.0};
    const auto rw = run_sweep(pr.params, weak, s);
    for (const auto& rec : rw.records) CHECK(rec.branches.size() == 1);
    const auto rs = run_sweep(pr.params, strong, s);
    std::size_t top = 0;
    for (const auto& rec : rs.records) top = std::max(top, rec.branches.size());
    CHECK(top == 3);
    for (const auto& rec : rs.records) {
        const auto q = apply_axis(pr.params, strong, s, rec.axis_value).first;
        CHECK(q.g2n() == doctest::Approx(rec.axis_value).epsilon(1e-12));
        CHECK(q.g == pr.params.g);
    }
}

TEST_CASE("absorption curve") {
    const Preset pr = preset(PresetName::fig2);
    const auto curve = input_for_absorption_curve(pr.params, 0.5, 100.0, 200);
    REQUIRE_FALSE(curve.omitted.empty());
    CHECK(curve.omitted.front().reason == "tied detuning needs g2n >= kappa^2");
    for (const auto& o : curve.omitted) {
        if (o.g2n >= 1.0) {
            CHECK(o.g2n <= 26.0);
            CHECK(o.reason.rfind("below coupling threshold", 0) == 0);
        }
    }
    REQUIRE_FALSE(curve.points.empty());
    for (const auto& pt : curve.points) {
        CHECK(pt.g2n > 26.0);
        CHECK(pt.amp2 > 0.0);
        CHECK(pt.certified);
        CHECK(pt.amp2 == doctest::Approx(pr.params.kappa * pt.x));
    }

    SystemParams blue = pr.params;
    blue.delta_a = 5.0;
    const auto bc = input_for_absorption_curve(blue, 2.0, 2.0, 2);
    REQUIRE(bc.points.size() == 2);
    CHECK(bc.points[0].amp2 > 0.0);
}

TEST_CASE("branches are continuous away from folds") {
    const Preset pr = preset(PresetName::fig3);
    const SweepResult r = run_sweep(pr.params, pr.drive, drive_spec(0.0, 500.0, 2000, pr.regime));
    for (std::size_t i = 1; i + 1 < r.records.size(); ++i) {
        const auto& a = r.records[i - 1];
        const auto& b = r.records[i];
        const auto& c = r.records[i + 1];
        if (a.branches.size() != 1 || b.branches.size() != 1 || c.branches.size() != 1) continue;
        const double s1 = (b.branches[0].x - a.branches[0].x) / (b.axis_value - a.axis_value);
        const double s2 = (c.branches[0].x - b.branches[0].x) / (c.axis_value - b.axis_value);
        CHECK(std::abs(s2) <= 10.0 * std::abs(s1) + 1e-9);
    }
}

TEST_CASE("thread count does not change the result") {
    const Preset pr = preset(PresetName::fig3);
    SweepSpec s = drive_spec(0.0, 500.0, 1000, pr.regime);
    s.threads = 1;
    const auto a = run_sweep(pr.params, pr.drive, s);
    s.threads = 4;
    const auto b = run_sweep(pr.params, pr.drive, s);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        REQUIRE(a.records[i].branches.size() == b.records[i].branches.size());
        CHECK(a.records[i].axis_value == b.records[i].axis_value);
        for (std::size_t j = 0; j < a.records[i].branches.size(); ++j)
            CHECK(a.records[i].branches[j].x == b.records[i].branches[j].x);
    }
    REQUIRE(a.folds.size() == b.folds.size());
    for (std::size_t i = 0; i < a.folds.size(); ++i) CHECK(a.folds[i].axis_value == b.folds[i].axis_value);
}

TEST_CASE("a failing point is reported with its axis value") {
    const Preset pr = preset(PresetName::fig2);
    SweepSpec s;
    s.axis = SweepAxis::coupling_g2n;
    s.tie_delta = true;
    s.lo = 0.5;
    s.hi = 10.0;
    s.points = 500;
    s.threads = 4;
    try {
        static_cast<void>(run_sweep(pr.params, pr.drive, s));
        FAIL("expected a sweep failure");
    } catch (const SweepFailure& e) {
        CHECK(e.axis_value() == 0.5);
    }
}

TEST_CASE("figure sweeps") {
    CHECK(figure_names().size() == 6);
    for (const auto& name : figure_names()) {
        const FigureSweep f = figure_sweep(name);
        CHECK(f.name == name);
        CHECK(validate(f.spec).empty());
    }
    CHECK(figure_sweep("fig2").spec.axis == SweepAxis::coupling_g2n);
    CHECK(figure_sweep("fig5b").spec.policy == BranchPolicy::up_sweep);
    CHECK_THROWS_AS(static_cast<void>(figure_sweep("fig4")), std::invalid_argument);
}
