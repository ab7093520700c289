#include "hybridcav/steady_state.hpp"
#include "oracles.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace hybridcav;

namespace {

// Fig. 6a parameters at g^2 N = 600: five physical roots for 4561 < amp2 < 13956.
SystemParams five_root_fixture() {
    SystemParams p = preset(PresetName::fig6a).params;
    p.n_atoms = 600.0 / (p.g * p.g);
    return p;
}

std::vector<double> roots_at(const SystemParams& p, double amp2, double phi, Regime r) {
    return solve_steady_states(p, {amp2, phi}, r).physical;
}

// Linear stability from a central-difference Jacobian of the right-hand side.
Stability jacobian_label(const SystemParams& p, const DriveConfig& d, Regime r, double x) {
    const MeanFieldState s = reconstruct_state(p, d, r, x).as_mean_field();
    auto pack = [](const MeanFieldState& m) {
        Eigen::VectorXd v(7);
        v << m.a.real(), m.a.imag(), m.b.real(), m.b.imag(), m.s_minus.real(), m.s_minus.imag(), m.s_z;
        return v;
    };
    auto rates = [&](const Eigen::VectorXd& v) {
        MeanFieldState m;
        m.a = {v[0], v[1]};
        m.b = {v[2], v[3]};
        m.s_minus = {v[4], v[5]};
        m.s_z = v[6];
        const MeanFieldRates q = mean_field_rhs(p, d, r, m);
        Eigen::VectorXd o(7);
        o << q.da.real(), q.da.imag(), q.db.real(), q.db.imag(), q.ds_minus.real(), q.ds_minus.imag(), q.ds_z;
        return o;
    };
    const int n = r == Regime::FullSaturation ? 7 : 6;
    const Eigen::VectorXd v0 = pack(s);
    Eigen::MatrixXd jac(n, n);
    for (int k = 0; k < n; ++k) {
        const double h = 1e-6 * std::max(1.0, std::abs(v0[k]));
        Eigen::VectorXd vp = v0, vm = v0;
        vp[k] += h;
        vm[k] -= h;
        jac.col(k) = ((rates(vp) - rates(vm)) / (2.0 * h)).head(n);
    }
    const auto ev = jac.eigenvalues();
    double growth = -INFINITY;
    for (int k = 0; k < n; ++k) growth = std::max(growth, ev[k].real());
    return growth < 0.0 ? Stability::stable : Stability::unstable;
}

}  // namespace

TEST_CASE("denominator agrees with the literal expression") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        const SystemParams p = oracle::random_params(rng);
        const auto d = derive_quantities(p);
        const double x = oracle::log_uniform(rng, 1e-4, 1e4);
        for (bool full : {false, true}) {
            const cplx got = denominator(p, d, full ? Regime::FullSaturation : Regime::LowExcitation, x);
            const cplx want = oracle::denominator(p, full, x);
            CHECK(std::abs(got - want) <= 1e-12 * std::abs(want));
        }
    }
}

TEST_CASE("denominator limits") {
    SystemParams p = preset(PresetName::fig3).params;
    const auto d = derive_quantities(p);
    CHECK(denominator(p, d, Regime::LowExcitation, 0.0) == denominator(p, d, Regime::FullSaturation, 0.0));

    p.g = 0.0;
    p.g0 = 0.0;
    const auto d0 = derive_quantities(p);
    for (double x : {0.0, 3.0, 1e5}) CHECK(denominator(p, d0, Regime::FullSaturation, x) == cplx(p.kappa, p.delta_a));
}

TEST_CASE("fixed-point polynomial reproduces the cleared residual") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> amp(0.0, 1e4), ph(0.0, 2.0 * std::numbers::pi);
    for (int i = 0; i < 200; ++i) {
        const SystemParams p = oracle::random_params(rng);
        const DriveConfig drive{amp(rng), ph(rng)};
        for (bool full : {false, true}) {
            const Regime r = full ? Regime::FullSaturation : Regime::LowExcitation;
            const Polynomial poly = build_fixed_point_poly(p, drive, r);
            CHECK(poly.degree() == (full ? 5 : 3));
            const double x = oracle::log_uniform(rng, 1e-3, 1e3);
            const double clear = full ? std::pow(1.0 + oracle::sat(p) * x, 2) : 1.0;
            const double want = oracle::residual(p, full, drive.amp2, drive.phi, x) * clear;
            const double scale = x * std::norm(oracle::denominator(p, full, x)) * clear +
                                 oracle::drive_k(p, drive.amp2, drive.phi) * clear;
            CHECK(std::abs(poly(x) - want) <= 1e-11 * scale);
        }
    }
}

TEST_CASE("destructive two-port drive leaves only the empty cavity") {
    for (auto n : {PresetName::fig3, PresetName::fig6a}) {
        const Preset pr = preset(n);
        const auto roots = roots_at(pr.params, 123.0, std::numbers::pi, pr.regime);
        REQUIRE(roots.size() == 1);
        CHECK(roots[0] == 0.0);
        const SteadyState s = reconstruct_state(pr.params, {123.0, std::numbers::pi}, pr.regime, roots[0]);
        CHECK(std::norm(s.a) < 1e-20);
    }
}

TEST_CASE("Xi = 0 collapses the cubic to linear response") {
    SystemParams p = preset(PresetName::fig2).params;
    p.g0 = 0.0;
    const DriveConfig drive{40.0, 0.0};
    const Polynomial poly = build_fixed_point_poly(p, drive, Regime::LowExcitation);
    CHECK(poly.degree() == 1);
    const auto d = derive_quantities(p);
    const double re = p.kappa + d.atom_susc_re, im = p.delta_a - d.atom_susc_im;
    const auto roots = roots_at(p, drive.amp2, 0.0, Regime::LowExcitation);
    REQUIRE(roots.size() == 1);
    CHECK(roots[0] == doctest::Approx(4.0 * 40.0 / (re * re + im * im)).epsilon(1e-13));
}

TEST_CASE("physical root filter") {
    const Preset pr = preset(PresetName::fig3);
    const DriveConfig drive{250.0, 0.0};
    const auto base = roots_at(pr.params, drive.amp2, 0.0, pr.regime);
    REQUIRE(base.size() == 3);
    const std::vector<cplx> input{{-1.0, 0.0},
                                  {base[0], 0.0},
                                  {base[2], 1e-13},
                                  {base[2] * (1.0 + 1e-10), 0.0},
                                  {base[1], 1e-3},
                                  {0.5 * (base[0] + base[1]), 0.0}};
    const auto got = physical_roots(input, pr.params, drive, pr.regime);
    REQUIRE(got.size() == 2);
    CHECK(got[0] == base[0]);
    CHECK(got[1] == doctest::Approx(base[2]).epsilon(1e-9));

    const std::vector<cplx> tiny_negative{{-1e-12, 0.0}};
    const auto clamped = physical_roots(tiny_negative, pr.params, {0.0, 0.0}, pr.regime);
    REQUIRE(clamped.size() == 1);
    CHECK(clamped[0] == 0.0);
}

TEST_CASE("bistable fig3 point has three roots confirmed by a brute-force scan") {
    const Preset pr = preset(PresetName::fig3);
    const auto roots = roots_at(pr.params, 250.0, 0.0, pr.regime);
    const auto brute = oracle::brute_roots(pr.params, false, 250.0, 0.0, 1000.0);
    REQUIRE(roots.size() == 3);
    REQUIRE(brute.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(roots[i] == doctest::Approx(brute[i]).epsilon(1e-10));
}

TEST_CASE("five-root fixture in the saturated regime") {
    const SystemParams p = five_root_fixture();
    const auto roots = roots_at(p, 8000.0, 0.0, Regime::FullSaturation);
    const auto brute = oracle::brute_roots(p, true, 8000.0, 0.0, 4.0 * 8000.0);
    REQUIRE(roots.size() == 5);
    REQUIRE(brute.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(roots[i] == doctest::Approx(brute[i]).epsilon(1e-10));
    const auto rep = solve_steady_states(p, {8000.0, 0.0}, Regime::FullSaturation);
    CHECK(rep.stability == heuristic_stability(5));
    const double gate = p.gamma_atom * p.gamma_atom / (4.0 * p.g * p.g);
    for (std::size_t i = 0; i < 5; ++i) CHECK(rep.nonlinear_gate[i] == (rep.physical[i] > gate));
}

TEST_CASE("reconstructed states are steady") {
    std::vector<std::pair<SystemParams, Regime>> cases{
        {preset(PresetName::fig2).params, Regime::LowExcitation},
        {preset(PresetName::fig3).params, Regime::LowExcitation},
        {preset(PresetName::fig6a).params, Regime::FullSaturation},
        {five_root_fixture(), Regime::FullSaturation},
    };
    std::mt19937_64 rng(23);
    for (int i = 0; i < 40; ++i) cases.emplace_back(oracle::random_params(rng), i % 2 ? Regime::FullSaturation : Regime::LowExcitation);
    for (const auto& [p, reg] : cases) {
        for (double amp2 : {10.0, 250.0, 8000.0}) {
            const DriveConfig drive{amp2, 0.3};
            for (double x : roots_at(p, amp2, drive.phi, reg)) {
                const SteadyState s = reconstruct_state(p, drive, reg, x);
                CHECK(std::abs(std::norm(s.a) - x) <= 1e-10 * x);
                CHECK(s.s_z < 0.0);
                CHECK(s.s_z >= -0.5 * p.n_atoms);
                if (reg == Regime::LowExcitation) CHECK(s.s_z == -0.5 * p.n_atoms);
                const double tol = 1e-8 * std::max(1.0, p.n_atoms * p.gamma_atom);
                CHECK(rhs_residual(p, drive, reg, s.as_mean_field()) <= tol);
                if (x > 0.0) {
                    MeanFieldState off = s.as_mean_field();
                    off.a *= std::sqrt(1.01);
                    CHECK(rhs_residual(p, drive, reg, off) > 0.0);
                }
            }
        }
    }
}

TEST_CASE("reconstruction limits and spurious roots") {
    SystemParams p = preset(PresetName::fig3).params;
    p.g0 = 0.0;
    const DriveConfig drive{50.0, 0.0};
    const double x = roots_at(p, 50.0, 0.0, Regime::FullSaturation).front();
    CHECK(reconstruct_state(p, drive, Regime::FullSaturation, x).b == cplx(0.0, 0.0));

    const SystemParams q = preset(PresetName::fig6a).params;
    const DriveConfig weak{1e-12, 0.0};
    const double x0 = roots_at(q, weak.amp2, 0.0, Regime::FullSaturation).front();
    CHECK(reconstruct_state(q, weak, Regime::FullSaturation, x0).s_z == doctest::Approx(-0.5 * q.n_atoms).epsilon(1e-12));

    const double root = roots_at(q, 500.0, 0.0, Regime::FullSaturation).front();
    CHECK_THROWS_AS(static_cast<void>(reconstruct_state(q, {500.0, 0.0}, Regime::FullSaturation, root * 1.01)), SpuriousRoot);

    MeanFieldState rest;
    rest.s_z = -0.5 * q.n_atoms;
    CHECK(rhs_residual(q, {0.0, 0.0}, Regime::FullSaturation, rest) == 0.0);
}

TEST_CASE("root counts are odd away from folds") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> amp(1e-3, 1e4), ph(0.0, 6.0);
    for (int i = 0; i < 300; ++i) {
        const SystemParams p = oracle::random_params(rng);
        const Regime reg = i % 2 ? Regime::FullSaturation : Regime::LowExcitation;
        DriveConfig drive{amp(rng), ph(rng)};
        auto n = roots_at(p, drive.amp2, drive.phi, reg).size();
        if (n % 2 == 0) n = roots_at(p, drive.amp2 * (1.0 + 1e-9), drive.phi, reg).size();
        CHECK(n % 2 == 1);
        CHECK(n <= (reg == Regime::FullSaturation ? 5u : 3u));
    }
}

TEST_CASE("regimes agree without atoms") {
    SystemParams p = preset(PresetName::fig3).params;
    p.g = 0.0;
    p.n_atoms = 0.0;
    for (double amp2 : {1.0, 100.0, 1e4}) {
        const auto a = roots_at(p, amp2, 0.0, Regime::LowExcitation);
        const auto b = roots_at(p, amp2, 0.0, Regime::FullSaturation);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
    }
}

TEST_CASE("roots move continuously under small perturbations") {
    const Preset pr = preset(PresetName::fig3);
    for (double amp2 : {50.0, 250.0, 400.0}) {
        const auto a = roots_at(pr.params, amp2, 0.0, pr.regime);
        const auto b = roots_at(pr.params, amp2 * (1.0 + 1e-6), 0.0, pr.regime);
        const auto c = roots_at(pr.params, amp2 * (1.0 + 2e-6), 0.0, pr.regime);
        REQUIRE(a.size() == b.size());
        REQUIRE(b.size() == c.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double slope = std::abs(c[i] - b[i]);
            CHECK(std::abs(b[i] - a[i]) <= 10.0 * slope + 1e-12 * a[i]);
        }
    }
}

TEST_CASE("heuristic stability labels") {
    CHECK(heuristic_stability(1) == std::vector<Stability>{Stability::stable});
    CHECK(heuristic_stability(3) == std::vector<Stability>{Stability::stable, Stability::unstable, Stability::stable});
    CHECK(heuristic_stability(2) == std::vector<Stability>{Stability::unknown, Stability::unknown});
    CHECK(heuristic_stability(5)[3] == Stability::unstable);
}

TEST_CASE("ODE confirmation of the bistable labels") {
    const Preset pr = preset(PresetName::fig3);
    const DriveConfig drive{250.0, 0.0};
    const auto rep = solve_steady_states(pr.params, drive, pr.regime);
    const auto labels = classify_stability(pr.params, drive, pr.regime, rep, {true});
    CHECK(labels == heuristic_stability(3));
    for (std::size_t i = 0; i < 3; ++i) CHECK(labels[i] == jacobian_label(pr.params, drive, pr.regime, rep.physical[i]));
}

// The upper pair is unstable here: the top root loses stability to an
// oscillatory mode, so alternation does not hold on this branch.
TEST_CASE("ODE labels on the five-root fixture match linear stability") {
    const SystemParams p = five_root_fixture();
    const DriveConfig drive{8000.0, 0.0};
    const auto rep = solve_steady_states(p, drive, Regime::FullSaturation);
    REQUIRE(rep.physical.size() == 5);
    const auto labels = classify_stability(p, drive, Regime::FullSaturation, rep, {true});
    for (std::size_t i = 0; i < 5; ++i) CHECK(labels[i] == jacobian_label(p, drive, Regime::FullSaturation, rep.physical[i]));
    CHECK(labels[4] == Stability::unstable);
}
