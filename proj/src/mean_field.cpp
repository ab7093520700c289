#include "hybridcav/mean_field.hpp"

#include <algorithm>
#include <cmath>

namespace hybridcav {

namespace {
constexpr cplx I{0.0, 1.0};
}

cplx input_drive(const SystemParams& p, const DriveConfig& drive) {
    const double amp = std::sqrt(drive.amp2);
    return std::sqrt(2.0 * p.kappa1) * amp + std::sqrt(2.0 * p.kappa2) * std::polar(amp, drive.phi);
}

MeanFieldRates mean_field_rhs(const SystemParams& p, const DriveConfig& drive, Regime regime,
                              const MeanFieldState& s) {
    MeanFieldRates r;
    const double x = std::norm(s.a);
    r.db = -I * p.omega_m * s.b - p.gamma_m * s.b - I * p.g0 * x;
    r.ds_minus = -I * p.delta * s.s_minus + 2.0 * I * p.g * s.a * s.s_z - 0.5 * p.gamma_atom * s.s_minus;
    if (regime == Regime::FullSaturation) {
        const cplx exchange = -I * p.g * s.a * std::conj(s.s_minus) + I * p.g * std::conj(s.a) * s.s_minus;
        r.ds_z = -p.gamma_atom * s.s_z + exchange.real() - 0.5 * p.n_atoms * p.gamma_atom;
    }
    const double b_quad = 2.0 * s.b.real();
    r.da = -I * p.delta_a * s.a - p.kappa * s.a - I * p.g * s.s_minus - I * p.g0 * s.a * b_quad +
           input_drive(p, drive);
    return r;
}

double max_abs_rate(const MeanFieldRates& r) {
    return std::max({std::abs(r.da), std::abs(r.db), std::abs(r.ds_minus), std::abs(r.ds_z)});
}

double scaled_rate_norm(const SystemParams& p, const MeanFieldState& s, const MeanFieldRates& r) {
    return std::max({std::abs(r.da) / (1.0 + std::abs(s.a)), std::abs(r.db) / (1.0 + std::abs(s.b)),
                     std::abs(r.ds_minus) / (1.0 + std::abs(s.s_minus)),
                     std::abs(r.ds_z) / std::max(1.0, p.n_atoms)});
}

}  // namespace hybridcav
