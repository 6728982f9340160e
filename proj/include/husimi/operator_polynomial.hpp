#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "husimi/fock_core.hpp"

namespace husimi {

/// Coefficients of a polynomial in two independent variables (zbar, z):
/// sum_{j,k} coeffs(j,k) zbar^j z^k.
struct BivariatePoly {
    CMatrix coeffs = CMatrix::Zero(1, 1);

    int degree_bar() const { return static_cast<int>(coeffs.rows()) - 1; }
    int degree_z() const { return static_cast<int>(coeffs.cols()) - 1; }

    cplx operator()(cplx zbar, cplx z) const {
        // Horner in z for each zbar power, then Horner in zbar.
        cplx acc = 0.0;
        for (int j = degree_bar(); j >= 0; --j) {
            cplx row = 0.0;
            for (int k = degree_z(); k >= 0; --k) row = row * z + coeffs(j, k);
            acc = acc * zbar + row;
        }
        return acc;
    }

    /// d/dz d/dzbar.
    BivariatePoly mixed_derivative() const {
        BivariatePoly out;
        const int r = std::max(1, degree_bar()), c = std::max(1, degree_z());
        out.coeffs = CMatrix::Zero(r, c);
        for (int j = 1; j <= degree_bar(); ++j)
            for (int k = 1; k <= degree_z(); ++k) out.coeffs(j - 1, k - 1) = static_cast<double>(j * k) * coeffs(j, k);
        return out;
    }

    /// e^{w} d dbar (e^{-w} g) with w = z zbar:
    ///   g_{z zbar} - g - z g_z - zbar g_zbar + z zbar g.
    BivariatePoly gaussian_mixed_derivative() const {
        BivariatePoly out;
        const int r = degree_bar() + 2, c = degree_z() + 2;
        out.coeffs = CMatrix::Zero(r, c);
        for (int j = 0; j <= degree_bar(); ++j) {
            for (int k = 0; k <= degree_z(); ++k) {
                const cplx a = coeffs(j, k);
                if (j >= 1 && k >= 1) out.coeffs(j - 1, k - 1) += static_cast<double>(j * k) * a;
                out.coeffs(j, k) -= (1.0 + j + k) * a;
                out.coeffs(j + 1, k + 1) += a;
            }
        }
        return out;
    }
};

/// Normally ordered polynomial sum c_{jk} adag^j a^k in the ladder operators of
/// one frame. Its Husimi transform in that frame is exactly sum c_{jk} zbar^j z^k.
class OperatorPolynomial {
public:
    explicit OperatorPolynomial(SqueezedFrame frame, CMatrix coeffs = CMatrix::Zero(1, 1))
        : frame_(frame), coeffs_(std::move(coeffs)) {}

    static OperatorPolynomial identity(SqueezedFrame frame) {
        CMatrix c = CMatrix::Zero(1, 1);
        c(0, 0) = 1.0;
        return OperatorPolynomial(frame, c);
    }
    static OperatorPolynomial annihilation(SqueezedFrame frame) {
        CMatrix c = CMatrix::Zero(1, 2);
        c(0, 1) = 1.0;
        return OperatorPolynomial(frame, c);
    }
    static OperatorPolynomial creation(SqueezedFrame frame) {
        CMatrix c = CMatrix::Zero(2, 1);
        c(1, 0) = 1.0;
        return OperatorPolynomial(frame, c);
    }
    /// Canonical position operator x expressed through the frame's ladder operators.
    static OperatorPolynomial position(SqueezedFrame frame) {
        const auto [xt, pt] = rotated_quadratures(frame);
        const double c = std::cos(frame.theta()), s = std::sin(frame.theta());
        return xt * c + pt * (-s);
    }
    /// Canonical momentum operator p.
    static OperatorPolynomial momentum(SqueezedFrame frame) {
        const auto [xt, pt] = rotated_quadratures(frame);
        const double c = std::cos(frame.theta()), s = std::sin(frame.theta());
        return xt * s + pt * c;
    }
    /// Canonical number operator (x^2 + p^2 - 1) / 2.
    static OperatorPolynomial canonical_number(SqueezedFrame frame) {
        const auto x = position(frame), p = momentum(frame);
        return (x * x + p * p + identity(frame) * -1.0) * 0.5;
    }

    const SqueezedFrame& frame() const { return frame_; }
    const CMatrix& coeffs() const { return coeffs_; }

    OperatorPolynomial operator+(const OperatorPolynomial& o) const {
        const int r = std::max(coeffs_.rows(), o.coeffs_.rows());
        const int c = std::max(coeffs_.cols(), o.coeffs_.cols());
        CMatrix out = CMatrix::Zero(r, c);
        out.topLeftCorner(coeffs_.rows(), coeffs_.cols()) += coeffs_;
        out.topLeftCorner(o.coeffs_.rows(), o.coeffs_.cols()) += o.coeffs_;
        return OperatorPolynomial(frame_, out);
    }
    OperatorPolynomial operator*(cplx s) const { return OperatorPolynomial(frame_, coeffs_ * s); }

    /// Product with normal reordering a^k adag^l = sum_i C(k,i) C(l,i) i! adag^{l-i} a^{k-i}.
    OperatorPolynomial operator*(const OperatorPolynomial& o) const {
        const int r = coeffs_.rows() + o.coeffs_.rows() - 1;
        const int c = coeffs_.cols() + o.coeffs_.cols() - 1;
        CMatrix out = CMatrix::Zero(r, c);
        for (int j = 0; j < coeffs_.rows(); ++j)
            for (int k = 0; k < coeffs_.cols(); ++k) {
                if (coeffs_(j, k) == 0.0) continue;
                for (int l = 0; l < o.coeffs_.rows(); ++l)
                    for (int m = 0; m < o.coeffs_.cols(); ++m) {
                        if (o.coeffs_(l, m) == 0.0) continue;
                        for (int i = 0; i <= std::min(k, l); ++i)
                            out(j + l - i, k + m - i) +=
                                coeffs_(j, k) * o.coeffs_(l, m) * (binom(k, i) * binom(l, i) * factorial(i));
                    }
            }
        return OperatorPolynomial(frame_, out);
    }

    /// Husimi transform in the polynomial's own frame.
    BivariatePoly husimi_transform() const { return BivariatePoly{coeffs_}; }

    /// Number-basis matrix in the frame, truncated at dim.
    CMatrix to_matrix(int dim) const {
        CMatrix out = CMatrix::Zero(dim, dim);
        for (int j = 0; j < coeffs_.rows(); ++j)
            for (int k = 0; k < coeffs_.cols(); ++k) {
                if (coeffs_(j, k) == 0.0) continue;
                for (int m = k; m < dim; ++m) {
                    const int n = m - k + j;
                    if (n >= dim) continue;
                    // a^k|m> = sqrt(m!/(m-k)!) |m-k>,  adag^j|m-k> = sqrt(n!/(m-k)!) |n>
                    const double amp = std::exp(0.5 * (std::lgamma(m + 1.0) - std::lgamma(m - k + 1.0) +
                                                       std::lgamma(n + 1.0) - std::lgamma(m - k + 1.0)));
                    out(n, m) += coeffs_(j, k) * amp;
                }
            }
        return out;
    }

    /// Largest min(j,k) over nonzero terms: the order at which exp(-d dbar) terminates.
    int terminating_order() const {
        int r = 0;
        for (int j = 0; j < coeffs_.rows(); ++j)
            for (int k = 0; k < coeffs_.cols(); ++k)
                if (coeffs_(j, k) != 0.0) r = std::max(r, std::min(j, k));
        return r;
    }

private:
    static double binom(int n, int k) { return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0))); }
    static double factorial(int n) { return std::round(std::exp(std::lgamma(n + 1.0))); }

    static std::pair<OperatorPolynomial, OperatorPolynomial> rotated_quadratures(SqueezedFrame frame) {
        const double l = frame.lambda();
        const auto a = annihilation(frame), ad = creation(frame);
        // x_theta = lambda (a + adag) / sqrt2,  p_theta = -i (a - adag) / (sqrt2 lambda)
        auto xt = (a + ad) * (l / std::numbers::sqrt2);
        auto pt = (a + ad * -1.0) * (-I / (std::numbers::sqrt2 * l));
        return {xt, pt};
    }

    SqueezedFrame frame_;
    CMatrix coeffs_;
};

}  // namespace husimi
