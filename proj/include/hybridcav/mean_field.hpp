#pragma once

#include "hybridcav/model.hpp"

#include <complex>

namespace hybridcav {

using cplx = std::complex<double>;

/// Classical expectation values of the cavity, mirror and collective atomic modes.
struct MeanFieldState {
    cplx a{};        ///< cavity field <a>
    cplx b{};        ///< mechanical amplitude <b>
    cplx s_minus{};  ///< atomic polarisation <S^->
    double s_z = 0.0;
    double t = 0.0;
};

/// Time derivatives of a MeanFieldState (t is not part of the vector field).
struct MeanFieldRates {
    cplx da{};
    cplx db{};
    cplx ds_minus{};
    double ds_z = 0.0;
};

/// Complex drive entering the cavity equation: sqrt(2k1) a1in + sqrt(2k2) a2in.
[[nodiscard]] cplx input_drive(const SystemParams& p, const DriveConfig& drive);

/// Right-hand side of the factorised equations of motion
///
///   b'   = -i wm b - gm b - i g0 |a|^2
///   S-'  = -i delta S- + 2 i g a Sz - (Gamma/2) S-
///   Sz'  = -Gamma Sz - i g a conj(S-) + i g conj(a) S- - N Gamma / 2
///   a'   = -i Da a - kappa a - i g S- - i g0 a (b + conj(b)) + drive
///
/// In the low-excitation regime Sz is held at -N/2 and its equation is dropped.
[[nodiscard]] MeanFieldRates mean_field_rhs(const SystemParams& p, const DriveConfig& drive, Regime regime,
                                            const MeanFieldState& s);

/// Largest absolute component of the right-hand side.
[[nodiscard]] double max_abs_rate(const MeanFieldRates& r);

/// Component-wise normalised rate used for convergence tests:
/// each derivative is divided by (1 + |value|), Sz by max(1, N).
[[nodiscard]] double scaled_rate_norm(const SystemParams& p, const MeanFieldState& s, const MeanFieldRates& r);

}  // namespace hybridcav
