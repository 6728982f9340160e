#pragma once

// Independent reference computations in the position representation.
// Everything here uses plain trapezoid sums on wide uniform grids and its own
// Hermite-function recursion, so it shares no numerics with the library.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
constexpr double pi = 3.14159265358979323846;
constexpr cplx I{0.0, 1.0};

// psi_0..psi_{count-1} at x.
inline std::vector<double> hermite_fns(double x, int count) {
    std::vector<double> h(count);
    h[0] = std::pow(pi, -0.25) * std::exp(-0.5 * x * x);
    if (count > 1) h[1] = std::sqrt(2.0) * x * h[0];
    for (int n = 2; n < count; ++n) h[n] = std::sqrt(2.0 / n) * x * h[n - 1] - std::sqrt((n - 1.0) / n) * h[n - 2];
    return h;
}

struct Grid {
    double half = 30.0;
    double step = 0.02;
    int size() const { return static_cast<int>(std::round(2 * half / step)) + 1; }
    double at(int i) const { return -half + step * i; }
};

// Random density matrix of the given dimension (Ginibre construction).
inline CMatrix random_density(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CMatrix a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = cplx(g(rng), g(rng));
    CMatrix rho = a * a.adjoint();
    return rho / rho.trace().real();
}

// U(k, n) = <k|n>_{lambda theta} for k < rows: column n is the frame number state in the ordinary basis.
inline CMatrix frame_to_ordinary(double lambda, double theta, int rows, int cols, Grid grid = {}) {
    CMatrix u = CMatrix::Zero(rows, cols);
    for (int i = 0; i < grid.size(); ++i) {
        const double x = grid.at(i);
        const auto a = hermite_fns(x, rows);
        const auto b = hermite_fns(x / lambda, cols);
        for (int k = 0; k < rows; ++k)
            for (int n = 0; n < cols; ++n) u(k, n) += grid.step * a[k] * b[n] / std::sqrt(lambda);
    }
    for (int k = 0; k < rows; ++k) u.row(k) *= std::exp(I * theta * static_cast<double>(k));
    return u;
}

// rho given in the frame's number basis, re-expressed in the ordinary basis (truncated at rows).
inline CMatrix to_ordinary(const CMatrix& rho, double lambda, double theta, int rows) {
    const CMatrix u = frame_to_ordinary(lambda, theta, rows, static_cast<int>(rho.rows()));
    return u * rho * u.adjoint();
}

// <x|_phi rho |y>_phi for rho in the ordinary basis; <x|_phi |n> = exp(-i phi n) psi_n(x).
inline cplx xphi_kernel(const CMatrix& rho, double phi, double x, double y) {
    const int d = static_cast<int>(rho.rows());
    const auto a = hermite_fns(x, d), b = hermite_fns(y, d);
    cplx s = 0.0;
    for (int n = 0; n < d; ++n)
        for (int m = 0; m < d; ++m) s += std::exp(-I * phi * double(n - m)) * a[n] * b[m] * rho(n, m);
    return s;
}

// W(x, p) = (1/pi) int <x - y|rho|x + y> exp(2 i p y) dy.
inline double wigner(const CMatrix& rho, double x, double p, Grid grid = {15.0, 0.01}) {
    cplx s = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
        const double y = grid.at(i);
        s += xphi_kernel(rho, 0.0, x - y, x + y) * std::exp(2.0 * I * p * y);
    }
    return (s * grid.step / pi).real();
}

// Q_{lambda theta}(x, p) = |<x,p|psi>|^2 / 2pi summed over rho, using the x_theta representation.
inline double husimi(const CMatrix& rho, double lambda, double theta, double x, double p, Grid grid = {}) {
    const double xt = std::cos(theta) * x + std::sin(theta) * p;
    const double pt = -std::sin(theta) * x + std::cos(theta) * p;
    const int d = static_cast<int>(rho.rows());
    Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(d);  // <x,p|n>
    for (int i = 0; i < grid.size(); ++i) {
        const double xp = grid.at(i);
        const double dx = xp - xt;
        const cplx coh = std::pow(pi, -0.25) / std::sqrt(lambda) * std::exp(-dx * dx / (2 * lambda * lambda) + I * pt * xp);
        const auto h = hermite_fns(xp, d);
        for (int n = 0; n < d; ++n) amp(n) += grid.step * std::conj(coh) * std::exp(-I * theta * double(n)) * h[n];
    }
    const Eigen::VectorXcd c = amp.conjugate();
    return c.dot(rho * c).real() / (2 * pi);  // amp^T rho conj(amp)
}

inline cplx trace_product(const CMatrix& a, const CMatrix& b) { return (a * b).trace(); }

}  // namespace oracle
