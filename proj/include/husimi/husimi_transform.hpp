#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "husimi/errors.hpp"
#include "husimi/fock_core.hpp"
#include "husimi/operator_polynomial.hpp"
#include "husimi/quadrature.hpp"

namespace husimi {

enum class FieldMode {
    density,   ///< Q = <x,p|rho|x,p> / (2 pi)
    operator_  ///< A(x,p) = <x,p|A|x,p>, no prefactor
};

/// Generalised Husimi transform of an operator in a given frame.
///
/// When the source's number basis is the frame's own basis ("native"), values
/// come from the double Fock series and the holomorphic continuation is
/// available. Otherwise real-plane values are computed from the squeezed
/// coherent state expanded in the source basis, and continuation is refused.
class HusimiField {
public:
    HusimiField(SqueezedFrame frame, const DensityOperator& rho, double tolerance = 1e-10)
        : frame_(frame), elements_(trimmed(rho.elements())), basis_(rho.basis()), mode_(FieldMode::density),
          declared_tail_(rho.declared_tail()), tolerance_(tolerance), growth_valid_(true) {}

    HusimiField(SqueezedFrame frame, const GeneralOperator& a, bool override_growth = false,
                double tolerance = 1e-10)
        : frame_(frame), elements_(a.elements()), basis_(a.basis()), mode_(FieldMode::operator_),
          tolerance_(tolerance) {
        growth_valid_ = override_growth ||
                        (a.dim() < 4 ? a.satisfies_declared_bound()
                                     : (a.satisfies_declared_bound() && estimate_growth(a).passes));
    }

    const SqueezedFrame& frame() const noexcept { return frame_; }
    const CMatrix& elements() const noexcept { return elements_; }
    const SqueezedFrame& basis() const noexcept { return basis_; }
    FieldMode mode() const noexcept { return mode_; }
    int dim() const noexcept { return static_cast<int>(elements_.rows()); }
    bool native() const { return basis_.same_as(frame_, 1e-13); }
    bool growth_valid() const noexcept { return growth_valid_; }
    double tolerance() const noexcept { return tolerance_; }
    double declared_tail() const noexcept { return declared_tail_; }
    double prefactor() const { return mode_ == FieldMode::density ? 1.0 / (2.0 * pi) : 1.0; }

    /// exp(-zm zp) sum zm^n zp^m A_nm / sqrt(n! m!), without the mode prefactor.
    /// exp(log_factor - zm zp) times the polynomial part; the exponents are merged so
    /// a decaying factor can cancel the Gaussian before anything overflows.
    cplx series(cplx zm, cplx zp, cplx log_factor = 0.0) const {
        const int n = dim();
        const CVector u = scaled_powers(zm, n);
        const CVector v = scaled_powers(zp, n);
        return std::exp(log_factor - zm * zp) * (u.transpose() * elements_ * v)(0, 0);
    }

    void check_tail() const {
        if (declared_tail_ > tolerance_)
            throw TruncationError("source truncation exceeds field tolerance", declared_tail_);
    }

    void require_continuable() const {
        if (!native()) throw std::invalid_argument("continuation requires the source in the frame's own number basis");
        if (!growth_valid_) throw GrowthError("operator fails the growth condition; pass override_growth to force");
    }

private:
    // Drops trailing all-zero rows and columns; exact, and keeps the series short.
    static CMatrix trimmed(const CMatrix& m) {
        int k = static_cast<int>(m.rows());
        while (k > 1 && m.row(k - 1).isZero(0.0) && m.col(k - 1).isZero(0.0)) --k;
        return m.topLeftCorner(k, k);
    }

    SqueezedFrame frame_;
    CMatrix elements_;
    SqueezedFrame basis_;
    FieldMode mode_;
    double declared_tail_ = 0.0;
    double tolerance_ = 1e-10;
    bool growth_valid_ = true;
};

/// Husimi transform on the real plane. Density mode returns a real value
/// (imaginary part dropped, it is rounding residue for Hermitian sources).
inline cplx husimi_real(const HusimiField& field, double x, double p) {
    field.check_tail();
    const PhasePoint pt{x, p};
    cplx value;
    if (field.native()) {
        const cplx z = z_of(field.frame(), pt);
        value = field.series(std::conj(z), z);
    } else {
        const CVector v = squeezed_state_in_basis(field.basis(), field.frame(), pt, field.dim());
        value = (v.adjoint() * field.elements() * v)(0, 0);
    }
    value *= field.prefactor();
    if (field.mode() == FieldMode::density) value = cplx(value.real(), 0.0);
    return value;
}

/// Holomorphic continuation to complexified phase space.
inline cplx husimi_continued(const HusimiField& field, const CPhasePoint& pt) {
    field.check_tail();
    field.require_continuable();
    const auto z = z_pm(field.frame(), pt);
    return field.series(z.minus, z.plus) * field.prefactor();
}

/// Complex point at which z_+ = z_2 and z_- = conj(z_1).
inline CPhasePoint complexified_midpoint(const SqueezedFrame& frame, const PhasePoint& a, const PhasePoint& b) {
    const double ch = std::cosh(2.0 * frame.eta()), sh = std::sinh(2.0 * frame.eta());
    const double c2 = std::cos(2.0 * frame.theta()), s2 = std::sin(2.0 * frame.theta());
    const double dx = a.x - b.x, dp = a.p - b.p;
    const cplx x = 0.5 * (a.x + b.x) + 0.5 * I * sh * s2 * dx - 0.5 * I * (ch + sh * c2) * dp;
    const cplx p = 0.5 * (a.p + b.p) + 0.5 * I * (ch - sh * c2) * dx - 0.5 * I * sh * s2 * dp;
    return {x, p};
}

/// <x1,p1|x2,p2> for squeezed coherent states of one frame.
inline cplx squeezed_overlap(const SqueezedFrame& frame, const PhasePoint& a, const PhasePoint& b) {
    const cplx z1 = z_of(frame, a), z2 = z_of(frame, b);
    return std::exp(-0.5 * (std::norm(z1) + std::norm(z2)) + std::conj(z1) * z2);
}

/// <x1,p1|A|x2,p2> through the inversion formula: overlap times the
/// continuation at the complexified midpoint. No 1/(2 pi) in either mode.
inline cplx offdiag_element(const HusimiField& field, const PhasePoint& a, const PhasePoint& b) {
    field.check_tail();
    field.require_continuable();
    const auto mid = complexified_midpoint(field.frame(), a, b);
    const auto z = z_pm(field.frame(), mid);
    return squeezed_overlap(field.frame(), a, b) * field.series(z.minus, z.plus);
}

/// <x1,p1|A|x2,p2> by the direct double Fock sum.
inline cplx offdiag_direct(const HusimiField& field, const PhasePoint& a, const PhasePoint& b) {
    field.check_tail();
    if (!field.native()) throw std::invalid_argument("offdiag_direct: source must be in the frame's number basis");
    const cplx z1 = z_of(field.frame(), a), z2 = z_of(field.frame(), b);
    const int n = field.dim();
    const CVector u = scaled_powers(std::conj(z1), n);
    const CVector v = scaled_powers(z2, n);
    return std::exp(-0.5 * (std::norm(z1) + std::norm(z2))) * (u.transpose() * field.elements() * v)(0, 0);
}

/// Tr(A rho) as a Gaussian-weighted integral over all four real dimensions of
/// complexified phase space of A^c(x*, p*) Q^c(x, p).
///
/// In coordinates x_{R,theta} = lambda t1, x_{I,theta} = lambda t2,
/// p_{R,theta} = t3 / lambda, p_{I,theta} = t4 / lambda the combined real
/// exponent is exactly -(t1^2 + t2^2 + t3^2 + t4^2), so a product Gauss-Hermite
/// rule with more than dim_A + dim_rho nodes per axis is exact. The node count is
/// set by that bound (quad.nodes is not used); quad still controls the refinement check.
inline cplx expectation_full(const GeneralOperator& a, const DensityOperator& rho, const SqueezedFrame& frame,
                             const QuadratureSpec& quad = {}) {
    const HusimiField af(frame, a);
    const HusimiField qf(frame, rho);
    af.require_continuable();
    qf.require_continuable();
    qf.check_tail();
    const int minimum = a.dim() + rho.dim() + 2;
    auto run = [&](int nodes) {
        const auto& rule = gauss_hermite(nodes);
        const double l = frame.lambda();
        const double c = std::cos(frame.theta()), s = std::sin(frame.theta());
        cplx sum = 0.0;
        for (int i1 = 0; i1 < nodes; ++i1)
            for (int i2 = 0; i2 < nodes; ++i2) {
                const cplx xt(l * rule.nodes[i1], l * rule.nodes[i2]);
                const double w12 = rule.scaled_weights[i1] * rule.scaled_weights[i2];
                for (int i3 = 0; i3 < nodes; ++i3)
                    for (int i4 = 0; i4 < nodes; ++i4) {
                        const cplx pt(rule.nodes[i3] / l, rule.nodes[i4] / l);
                        const cplx x = c * xt - s * pt;
                        const cplx p = s * xt + c * pt;
                        const double gauss = std::exp(-2.0 * xt.imag() * xt.imag() / (l * l) -
                                                      2.0 * l * l * pt.imag() * pt.imag());
                        const auto zq = z_pm(frame, {x, p});
                        const auto za = z_pm(frame, {std::conj(x), std::conj(p)});
                        const cplx val = af.series(za.minus, za.plus) * qf.series(zq.minus, zq.plus);
                        sum += w12 * rule.scaled_weights[i3] * rule.scaled_weights[i4] * gauss * val;
                    }
            }
        return sum * (2.0 / pi) / (2.0 * pi);
    };
    const cplx coarse = run(minimum);
    if (!quad.check_convergence) return coarse;
    const cplx fine = run(minimum + 4);
    const double change = std::abs(fine - coarse);
    if (change > quad.tolerance * std::max(1.0, std::abs(fine)))
        throw QuadratureError("expectation_full: 4D rule did not converge", change);
    return fine;
}

/// Truncated expansion exp(-d dbar) A_{lambda theta} = sum_r (-1)^r / r! (d dbar)^r A_{lambda theta}.
///
/// Polynomial operators give polynomial terms and the series terminates.
/// Matrix operators give terms exp(-z zbar) g_r(zbar, z) with g_r polynomial;
/// those series do not terminate and require explicit consent.
class AntiHusimiSeries {
public:
    static AntiHusimiSeries from_polynomial(const OperatorPolynomial& op) {
        AntiHusimiSeries s;
        s.frame_ = op.frame();
        s.gaussian_ = false;
        s.terminates_ = true;
        s.max_order_ = op.terminating_order();
        BivariatePoly term = op.husimi_transform();
        double coef = 1.0;
        for (int r = 0; r <= s.max_order_; ++r) {
            BivariatePoly scaled{term.coeffs * coef};
            s.terms_.push_back(scaled);
            term = term.mixed_derivative();
            coef *= -1.0 / (r + 1);
        }
        return s;
    }

    static AntiHusimiSeries from_operator(const GeneralOperator& a, const SqueezedFrame& frame, int max_order,
                                          bool accept_truncation) {
        if (!accept_truncation)
            throw NonTerminatingSeriesError("anti-Husimi series of a general operator does not terminate");
        if (!a.basis().same_as(frame)) throw std::invalid_argument("operator must be in the frame's number basis");
        AntiHusimiSeries s;
        s.frame_ = frame;
        s.gaussian_ = true;
        s.terminates_ = false;
        s.max_order_ = max_order;
        const int n = a.dim();
        BivariatePoly g;
        g.coeffs = CMatrix::Zero(n, n);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                g.coeffs(j, k) = a.elements()(j, k) * std::exp(-0.5 * (std::lgamma(j + 1.0) + std::lgamma(k + 1.0)));
        double coef = 1.0;
        for (int r = 0; r <= max_order; ++r) {
            s.terms_.push_back(BivariatePoly{g.coeffs * coef});
            g = g.gaussian_mixed_derivative();
            coef *= -1.0 / (r + 1);
        }
        // Heuristic: largest |last term| on a grid |z| <= 2.
        double est = 0.0;
        for (int i = -4; i <= 4; ++i)
            for (int j = -4; j <= 4; ++j) {
                const cplx z(0.5 * i, 0.5 * j);
                est = std::max(est, std::abs(s.term_value(max_order, z)));
            }
        s.truncation_estimate_ = est;
        return s;
    }

    const SqueezedFrame& frame() const noexcept { return frame_; }
    int max_order() const noexcept { return max_order_; }
    bool terminates() const noexcept { return terminates_; }
    double truncation_estimate() const noexcept { return truncation_estimate_; }
    int term_count() const noexcept { return static_cast<int>(terms_.size()); }

    cplx term_value(int r, cplx z) const {
        const cplx v = terms_.at(r)(std::conj(z), z);
        return gaussian_ ? v * std::exp(-std::norm(z)) : v;
    }

    /// A^a at a real point: sum of all retained orders.
    cplx operator()(double x, double p) const {
        const cplx z = z_of(frame_, {x, p});
        cplx sum = 0.0;
        for (int r = 0; r < term_count(); ++r) sum += term_value(r, z);
        return sum;
    }

    int polynomial_degree() const {
        int d = 0;
        for (const auto& t : terms_) d = std::max(d, t.degree_bar() + t.degree_z());
        return d;
    }

private:
    SqueezedFrame frame_;
    std::vector<BivariatePoly> terms_;
    int max_order_ = 0;
    bool gaussian_ = false;
    bool terminates_ = true;
    double truncation_estimate_ = 0.0;
};

/// Tr(A rho) as the real-plane integral of A^a Q.
inline cplx expectation_antihusimi(const AntiHusimiSeries& series, const DensityOperator& rho,
                                   const SqueezedFrame& frame, const QuadratureSpec& quad = {}) {
    if (!series.frame().same_as(frame)) throw std::invalid_argument("series frame differs from evaluation frame");
    const HusimiField qf(frame, rho);
    qf.check_tail();
    if (!qf.native()) throw std::invalid_argument("expectation_antihusimi: rho must be in the frame's number basis");
    // Scaled coordinates X = x_theta / lambda = sqrt2 t1, P = lambda p_theta = sqrt2 t2, dx dp = dX dP.
    auto run = [&](int nodes) {
        const auto& rule = gauss_hermite(nodes);
        cplx sum = 0.0;
        for (int i = 0; i < nodes; ++i)
            for (int j = 0; j < nodes; ++j) {
                const cplx z(rule.nodes[i], rule.nodes[j]);  // (X + iP)/sqrt2
                const PhasePoint pt = point_from_z(frame, z);
                const cplx q = qf.series(std::conj(z), z) / (2.0 * pi);
                sum += rule.scaled_weights[i] * rule.scaled_weights[j] * series(pt.x, pt.p) * q;
            }
        return 2.0 * sum;
    };
    const int minimum = (series.polynomial_degree() + 2 * rho.dim()) / 2 + 4;
    const int nodes = std::max(quad.nodes, minimum);
    const cplx coarse = run(nodes);
    if (!quad.check_convergence) return coarse;
    const cplx fine = run(quad.refined_nodes() > nodes ? quad.refined_nodes() : nodes + 8);
    const double change = std::abs(fine - coarse);
    if (change > quad.tolerance * std::max(1.0, std::abs(fine)))
        throw QuadratureError("expectation_antihusimi: rule did not converge", change);
    return fine;
}

}  // namespace husimi
