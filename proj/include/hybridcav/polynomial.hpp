#pragma once

#include <complex>
#include <span>
#include <vector>

namespace hybridcav {

/// Real polynomial sum_k coeffs[k] x^k, stored lowest order first.
struct Polynomial {
    std::vector<double> coeffs;

    [[nodiscard]] int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    [[nodiscard]] double operator()(double x) const;
    [[nodiscard]] std::complex<double> operator()(std::complex<double> z) const;
    [[nodiscard]] Polynomial derivative() const;
};

/// Drops exactly-zero leading coefficients (keeps at least the constant term).
[[nodiscard]] Polynomial trimmed(Polynomial p);

/// Builds prod_k (x - r_k) with real coefficients from real roots.
[[nodiscard]] Polynomial from_roots(std::span<const double> roots, double leading = 1.0);

/// All complex roots of a polynomial of degree >= 1.
///
/// Exact zero roots are deflated first. The remaining polynomial is rescaled
/// to unit root magnitude, its balanced companion matrix is diagonalised,
/// and each eigenvalue gets one Newton step on the original polynomial.
/// Throws std::invalid_argument for degree-0 input.
[[nodiscard]] std::vector<std::complex<double>> solve_poly(const Polynomial& poly);

/// |p(z)| / sum_k |c_k| |z|^k: the relative backward error of a root.
[[nodiscard]] double backward_error(const Polynomial& poly, std::complex<double> z);

}  // namespace hybridcav
