#include "hybridcav/oracle.hpp"
#include "hybridcav/steady_state.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace hybridcav;

namespace {

MeanFieldState vacuum(const SystemParams& p) {
    MeanFieldState s;
    s.s_z = -0.5 * p.n_atoms;
    return s;
}

MeanFieldState field_state(const SystemParams& p, double x) {
    MeanFieldState s = vacuum(p);
    s.a = std::sqrt(x);
    return s;
}

}  // namespace

TEST_CASE("undriven vacuum is a fixed point of the integrator") {
    const Preset pr = preset(PresetName::fig6a);
    IntegrationConfig cfg = default_integration(pr.params, 1.0);
    cfg.t_max = 200.0 * cfg.dt;
    const auto traj = integrate(pr.params, {0.0, 0.0}, pr.regime, vacuum(pr.params), cfg);
    REQUIRE(traj.size() >= 2);
    for (const auto& s : traj) {
        CHECK(s.a == cplx(0.0, 0.0));
        CHECK(s.b == cplx(0.0, 0.0));
        CHECK(s.s_minus == cplx(0.0, 0.0));
        CHECK(s.s_z == -0.5 * pr.params.n_atoms);
    }
    CHECK(traj.back().t == doctest::Approx(cfg.t_max));
}

TEST_CASE("monostable drive settles onto the analytic root") {
    const Preset pr = preset(PresetName::fig3);
    const DriveConfig drive{60.0, 0.0};
    const auto rep = solve_steady_states(pr.params, drive, pr.regime);
    REQUIRE(rep.physical.size() == 1);
    const auto cfg = default_integration(pr.params, rep.physical[0]);
    const SettleResult r = settle(pr.params, drive, pr.regime, vacuum(pr.params), cfg);
    REQUIRE(r.status == SettleStatus::converged);
    CHECK(std::norm(r.state.a) == doctest::Approx(rep.physical[0]).epsilon(1e-6));
}

TEST_CASE("population relaxes at Gamma without coupling") {
    SystemParams p = preset(PresetName::fig6a).params;
    p.g = 0.0;
    MeanFieldState s;
    s.s_z = 0.0;
    p.n_atoms = 1000.0;
    IntegrationConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_max = 1.5;
    const auto traj = integrate(p, {10.0, 0.0}, Regime::FullSaturation, s, cfg);
    const double want = -0.5 * p.n_atoms * (1.0 - std::exp(-p.gamma_atom * cfg.t_max));
    CHECK(traj.back().s_z == doctest::Approx(want).epsilon(1e-10));

    const auto frozen = integrate(p, {10.0, 0.0}, Regime::LowExcitation, vacuum(p), cfg);
    CHECK(frozen.back().s_z == -0.5 * p.n_atoms);
}

TEST_CASE("bistable outer branches attract and the middle branch repels") {
    const Preset pr = preset(PresetName::fig3);
    const DriveConfig drive{250.0, 0.0};
    const auto roots = solve_steady_states(pr.params, drive, pr.regime).physical;
    REQUIRE(roots.size() == 3);
    const auto cfg = default_integration(pr.params, 1.1 * roots[2]);

    const SettleResult low = settle(pr.params, drive, pr.regime, vacuum(pr.params), cfg);
    REQUIRE(low.status == SettleStatus::converged);
    CHECK(std::norm(low.state.a) == doctest::Approx(roots[0]).epsilon(1e-5));

    const MeanFieldState hot = reconstruct_state(pr.params, drive, pr.regime, roots[2]).as_mean_field();
    MeanFieldState kicked = hot;
    kicked.a *= std::sqrt(1.05);
    const SettleResult high = settle(pr.params, drive, pr.regime, kicked, cfg);
    REQUIRE(high.status == SettleStatus::converged);
    CHECK(std::norm(high.state.a) == doctest::Approx(roots[2]).epsilon(1e-5));

    const ProbeResult mid = probe_stability(pr.params, drive, pr.regime, roots, 1);
    CHECK(mid.label == Stability::unstable);
    CHECK(mid.epsilon > 0.0);
    CHECK(mid.epsilon <= 0.01);
    REQUIRE(mid.settled_x.size() == 2);
    for (double x : mid.settled_x) CHECK(std::abs(x - roots[1]) > 1e-3 * roots[1]);
    CHECK(probe_stability(pr.params, drive, pr.regime, roots, 0).label == Stability::stable);
}

TEST_CASE("grid scan brackets") {
    const Preset pr = preset(PresetName::fig3);

    const DriveConfig dark{100.0, std::numbers::pi};
    const auto zero = residual_grid_scan(pr.params, dark, pr.regime, default_grid(pr.params, dark));
    REQUIRE(zero.size() == 1);
    CHECK(zero[0].root == 0.0);

    const DriveConfig drive{250.0, 0.0};
    const auto roots = solve_steady_states(pr.params, drive, pr.regime).physical;
    const GridScanSpec spec = default_grid(pr.params, drive);
    CHECK(spec.x_max >= 4.0 * drive.amp2 / (pr.params.kappa * pr.params.kappa));
    const auto br = residual_grid_scan(pr.params, drive, pr.regime, spec);
    REQUIRE(br.size() == roots.size());
    for (std::size_t i = 0; i < br.size(); ++i) {
        CHECK(br[i].lo <= br[i].root);
        CHECK(br[i].root <= br[i].hi);
        CHECK(std::abs(br[i].root - roots[i]) <= 1e-8 * roots[i]);
    }

    SystemParams five = preset(PresetName::fig6a).params;
    five.n_atoms = 600.0 / (five.g * five.g);
    const DriveConfig strong{8000.0, 0.0};
    GridScanSpec geo = default_grid(five, strong);
    geo.points = 400000;
    const auto br5 = residual_grid_scan(five, strong, Regime::FullSaturation, geo);
    const auto roots5 = solve_steady_states(five, strong, Regime::FullSaturation).physical;
    REQUIRE(br5.size() == 5);
    REQUIRE(roots5.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(br5[i].root - roots5[i]) <= 1e-8 * roots5[i]);
}

TEST_CASE("halving the step changes the trajectory below 1e-8") {
    const Preset pr = preset(PresetName::fig3);
    const DriveConfig drive{60.0, 0.0};
    IntegrationConfig cfg = default_integration(pr.params, 100.0);
    cfg.t_max = 5.0;
    const auto a = integrate(pr.params, drive, pr.regime, vacuum(pr.params), cfg).back();
    cfg.dt *= 0.5;
    const auto b = integrate(pr.params, drive, pr.regime, vacuum(pr.params), cfg).back();
    CHECK(std::abs(a.a - b.a) <= 1e-8 * std::max(1.0, std::abs(b.a)));
    CHECK(std::abs(a.s_minus - b.s_minus) <= 1e-8 * std::max(1.0, std::abs(b.s_minus)));
}

TEST_CASE("integration configuration guard") {
    const SystemParams p = preset(PresetName::fig6a).params;
    IntegrationConfig cfg = default_integration(p, 10.0);
    CHECK(integration_config_valid(p, cfg));
    CHECK(cfg.dt <= 0.01 / std::sqrt(p.g2n()) + 1e-15);

    IntegrationConfig coarse = cfg;
    coarse.dt = 1.0;
    CHECK_FALSE(integration_config_valid(p, coarse));
    CHECK_THROWS_AS(static_cast<void>(integrate(p, {1.0, 0.0}, Regime::FullSaturation, vacuum(p), coarse)),
                    std::invalid_argument);

    IntegrationConfig nonpositive = cfg;
    nonpositive.dt = 0.0;
    CHECK_FALSE(integration_config_valid(p, nonpositive));
    nonpositive.dt = cfg.dt;
    nonpositive.stride = 0;
    CHECK_FALSE(integration_config_valid(p, nonpositive));
}

TEST_CASE("unbounded growth raises a divergence error") {
    SystemParams p = preset(PresetName::fig3).params;
    p.kappa = -50.0;
    IntegrationConfig cfg;
    cfg.dt = 0.002;
    cfg.t_max = 100.0;
    try {
        static_cast<void>(integrate(p, {1.0, 0.0}, Regime::LowExcitation, field_state(p, 1.0), cfg));
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.last_finite_time() > 0.0);
        CHECK(e.last_finite_time() < cfg.t_max);
    }
}

TEST_CASE("preset operating points settle without oscillation") {
    for (auto n : all_presets()) {
        const Preset pr = preset(n);
        const auto rep = solve_steady_states(pr.params, pr.drive, pr.regime);
        const auto cfg = default_integration(pr.params, 1.1 * rep.physical.back() + 1.0);
        const SettleResult r = settle(pr.params, pr.drive, pr.regime, vacuum(pr.params), cfg);
        INFO(to_string(n));
        CHECK(r.status == SettleStatus::converged);
    }
}
