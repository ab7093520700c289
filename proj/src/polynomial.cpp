#include "hybridcav/polynomial.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hybridcav {

double Polynomial::operator()(double x) const {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

std::complex<double> Polynomial::operator()(std::complex<double> z) const {
    std::complex<double> acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
    return acc;
}

Polynomial Polynomial::derivative() const {
    Polynomial d;
    if (coeffs.size() <= 1) {
        d.coeffs = {0.0};
        return d;
    }
    d.coeffs.resize(coeffs.size() - 1);
    for (std::size_t k = 1; k < coeffs.size(); ++k) d.coeffs[k - 1] = static_cast<double>(k) * coeffs[k];
    return d;
}

Polynomial trimmed(Polynomial p) {
    while (p.coeffs.size() > 1 && p.coeffs.back() == 0.0) p.coeffs.pop_back();
    if (p.coeffs.empty()) p.coeffs = {0.0};
    return p;
}

Polynomial from_roots(std::span<const double> roots, double leading) {
    std::vector<double> c{leading};
    for (double r : roots) {
        std::vector<double> next(c.size() + 1, 0.0);
        for (std::size_t k = 0; k < c.size(); ++k) {
            next[k + 1] += c[k];
            next[k] -= r * c[k];
        }
        c = std::move(next);
    }
    return Polynomial{std::move(c)};
}

double backward_error(const Polynomial& poly, std::complex<double> z) {
    double scale = 0.0;
    const double az = std::abs(z);
    double zk = 1.0;
    for (double c : poly.coeffs) {
        scale += std::abs(c) * zk;
        zk *= az;
    }
    if (scale == 0.0) return 0.0;
    return std::abs(poly(z)) / scale;
}

namespace {

// Parlett-Reinsch diagonal balancing, radix 2.
void balance(Eigen::MatrixXd& m) {
    const Eigen::Index n = m.rows();
    constexpr double radix = 2.0;
    bool done = false;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double c = 0.0;
            double r = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(m(j, i));
                r += std::abs(m(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= radix * radix;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                m.row(i) /= f;
                m.col(i) *= f;
            }
        }
    }
}

}  // namespace

std::vector<std::complex<double>> solve_poly(const Polynomial& input) {
    Polynomial poly = trimmed(input);
    if (poly.degree() < 1) throw std::invalid_argument("solve_poly: polynomial has degree 0");

    std::vector<std::complex<double>> roots;
    std::size_t zeros = 0;
    while (zeros < poly.coeffs.size() - 1 && poly.coeffs[zeros] == 0.0) ++zeros;
    roots.assign(zeros, std::complex<double>(0.0, 0.0));

    std::vector<double> c(poly.coeffs.begin() + static_cast<std::ptrdiff_t>(zeros), poly.coeffs.end());
    const int d = static_cast<int>(c.size()) - 1;
    if (d == 0) return roots;

    // x = sigma y puts the geometric mean of |roots| at 1.
    const double sigma = std::pow(std::abs(c.front() / c.back()), 1.0 / d);
    std::vector<double> monic(c.size());
    {
        double sk = 1.0;
        for (int k = 0; k <= d; ++k) {
            monic[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(k)] * sk;
            sk *= sigma;
        }
        const double lead = monic.back();
        for (double& v : monic) v /= lead;
    }

    std::vector<std::complex<double>> scaled;
    if (d == 1) {
        scaled.emplace_back(-monic[0], 0.0);
    } else {
        Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(d, d);
        for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
        for (int i = 0; i < d; ++i) comp(i, d - 1) = -monic[static_cast<std::size_t>(i)];
        balance(comp);
        Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
        if (es.info() != Eigen::Success) throw std::runtime_error("solve_poly: eigenvalue iteration failed");
        const auto ev = es.eigenvalues();
        for (Eigen::Index i = 0; i < ev.size(); ++i) scaled.push_back(ev(i));
    }

    const Polynomial scaled_poly{monic};
    const Polynomial scaled_deriv = scaled_poly.derivative();
    for (auto z : scaled) {
        const auto dp = scaled_deriv(z);
        if (std::abs(dp) > 0.0) {
            const auto step = scaled_poly(z) / dp;
            const auto candidate = z - step;
            // Accept the Newton step only when it does not worsen the residual.
            if (std::abs(scaled_poly(candidate)) <= std::abs(scaled_poly(z))) z = candidate;
        }
        if (z.imag() == 0.0) z = {z.real(), 0.0};
        roots.push_back(z * sigma);
    }
    return roots;
}

}  // namespace hybridcav
