#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "husimi/errors.hpp"
#include "husimi/quadrature.hpp"

namespace husimi {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// Filter reference: a squeezed vacuum with width parameter lambda rotated by theta.
/// The frame's annihilation operator is (x_theta / lambda + i lambda p_theta) / sqrt(2).
class SqueezedFrame {
public:
    SqueezedFrame() = default;
    SqueezedFrame(double lambda, double theta) : lambda_(lambda) {
        if (!(lambda > 0.0) || !std::isfinite(lambda))
            throw std::invalid_argument("SqueezedFrame: lambda must be positive and finite");
        if (!std::isfinite(theta)) throw std::invalid_argument("SqueezedFrame: theta must be finite");
        theta_ = std::fmod(theta, 2.0 * pi);
        if (theta_ < 0.0) theta_ += 2.0 * pi;
        if (theta_ >= 2.0 * pi) theta_ = 0.0;
        eta_ = std::log(lambda);
    }

    /// lambda = 1, theta = 0: the ordinary Q-function frame.
    static SqueezedFrame canonical() { return {}; }

    double lambda() const noexcept { return lambda_; }
    double theta() const noexcept { return theta_; }
    double eta() const noexcept { return eta_; }

    bool same_as(const SqueezedFrame& other, double tol = 1e-14) const {
        const double dt = std::remainder(theta_ - other.theta_, 2.0 * pi);
        return std::abs(lambda_ - other.lambda_) <= tol * lambda_ && std::abs(dt) <= tol;
    }

private:
    double lambda_ = 1.0;
    double theta_ = 0.0;
    double eta_ = 0.0;
};

/// A real phase-space point.
struct PhasePoint {
    double x = 0.0;
    double p = 0.0;
};

/// A point of complexified phase space (hbar = 1).
struct CPhasePoint {
    cplx x;
    cplx p;

    CPhasePoint() = default;
    CPhasePoint(cplx x_, cplx p_) : x(x_), p(p_) {}
    CPhasePoint(const PhasePoint& r) : x(r.x), p(r.p) {}  // NOLINT: real plane embeds

    bool is_real(double tol = 0.0) const { return std::abs(x.imag()) <= tol && std::abs(p.imag()) <= tol; }
    PhasePoint real_part() const { return {x.real(), p.real()}; }
};

/// (x_theta, p_theta) = (cos t x + sin t p, -sin t x + cos t p).
inline std::pair<cplx, cplx> rotate_quadratures(cplx x, cplx p, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    return {c * x + s * p, -s * x + c * p};
}

struct ZPair {
    cplx minus;
    cplx plus;
};

/// z_pm = (x_theta / lambda +- i lambda p_theta) / sqrt(2). Independent for complex points.
inline ZPair z_pm(const SqueezedFrame& frame, const CPhasePoint& pt) {
    const auto [xt, pt_] = rotate_quadratures(pt.x, pt.p, frame.theta());
    const double l = frame.lambda();
    return {(xt / l - I * l * pt_) / std::numbers::sqrt2, (xt / l + I * l * pt_) / std::numbers::sqrt2};
}

/// Complex label z of the squeezed coherent state centred at a real point.
inline cplx z_of(const SqueezedFrame& frame, const PhasePoint& pt) {
    return z_pm(frame, CPhasePoint(pt)).plus;
}

/// Inverse of z_of.
inline PhasePoint point_from_z(const SqueezedFrame& frame, cplx z) {
    const double xt = std::numbers::sqrt2 * frame.lambda() * z.real();
    const double pt = std::numbers::sqrt2 * z.imag() / frame.lambda();
    const auto [x, p] = rotate_quadratures(xt, pt, -frame.theta());
    return {x.real(), p.real()};
}

/// Normalised Hermite functions psi_0..psi_{count-1} at x (stable three-term recurrence).
inline std::vector<double> hermite_functions(double x, int count) {
    std::vector<double> psi(std::max(count, 0));
    if (count <= 0) return psi;
    psi[0] = std::pow(pi, -0.25) * std::exp(-0.5 * x * x);
    if (count > 1) psi[1] = std::numbers::sqrt2 * x * psi[0];
    for (int k = 1; k + 1 < count; ++k)
        psi[k + 1] = std::sqrt(2.0 / (k + 1)) * x * psi[k] - std::sqrt(static_cast<double>(k) / (k + 1)) * psi[k - 1];
    return psi;
}

/// z^n / sqrt(n!) for n < count, by running product (no factorial overflow).
inline CVector scaled_powers(cplx z, int count) {
    CVector v(count);
    if (count == 0) return v;
    v(0) = 1.0;
    for (int n = 1; n < count; ++n) v(n) = v(n - 1) * z / std::sqrt(static_cast<double>(n));
    return v;
}

/// Truncated expansion of a squeezed coherent state in its own frame's number basis.
struct CoherentAmplitudes {
    CVector amplitudes;
    /// Bound on the norm-squared mass beyond the last included amplitude.
    double tail_bound = 0.0;
};

inline CoherentAmplitudes coherent_amplitudes(const SqueezedFrame& frame, const PhasePoint& pt, int n) {
    if (n <= 0) throw std::invalid_argument("coherent_amplitudes: truncation must be positive");
    const cplx z = z_of(frame, pt);
    const double w = std::norm(z);
    CoherentAmplitudes out;
    out.amplitudes = scaled_powers(z, n) * std::exp(-0.5 * w);
    // |c_{k+1}|^2 / |c_k|^2 = w / (k+1) <= w / (n+1) for k >= n.
    const double next = std::norm(out.amplitudes(n - 1)) * w / n;
    const double ratio = w / (n + 1);
    out.tail_bound = ratio < 1.0 ? next / (1.0 - ratio) : std::max(0.0, 1.0 - out.amplitudes.squaredNorm());
    return out;
}

/// <x'|x,p>_{lambda theta} with |x'> an eigenket of x_phi (delta = theta - phi).
/// The trailing -p_phi x_phi / 2 term is taken as a phase.
inline cplx position_overlap(const SqueezedFrame& frame, const PhasePoint& pt, double phi, double x_prime) {
    const double l = frame.lambda();
    const double delta = frame.theta() - phi;
    const double c = std::cos(delta), s = std::sin(delta);
    const auto [xf, pf] = rotate_quadratures(pt.x, pt.p, phi);
    const double xphi = xf.real(), pphi = pf.real();
    const cplx width = l * c - I * s / l;
    const cplx pref = std::sqrt(std::exp(-I * delta) / (std::sqrt(pi) * width));
    const cplx coeff = (c / l - I * l * s) / (2.0 * width);
    const double dx = x_prime - xphi;
    return pref * std::exp(-coeff * dx * dx + I * pphi * x_prime - 0.5 * I * pphi * xphi);
}

/// Amplitudes <k|_basis |x,p>_target for k < count, for two arbitrary frames.
/// Computed as an integral in the x_{theta_basis} representation, where the basis
/// number states are scaled Hermite functions. The integrand is a polynomial of degree
/// count - 1 times exp(-A x'^2 + B x'), A complex; the contour x' = x* + t / sqrt(A) through
/// the stationary point turns it into exp(-t^2) times a polynomial, so a Gauss-Hermite
/// rule with more than count / 2 nodes is exact.
inline CVector squeezed_state_in_basis(const SqueezedFrame& basis, const SqueezedFrame& target,
                                       const PhasePoint& pt, int count, int nodes = 0) {
    if (count <= 0) throw std::invalid_argument("squeezed_state_in_basis: count must be positive");
    if (nodes <= 0) nodes = count / 2 + 8;
    const double lb = basis.lambda();
    const double phi = basis.theta();
    const double l = target.lambda();
    const double delta = target.theta() - phi;
    const double c = std::cos(delta), s = std::sin(delta);
    const auto [xf, pf] = rotate_quadratures(pt.x, pt.p, phi);
    const double xphi = xf.real(), pphi = pf.real();
    // log <x'|x,p> = log pref - coeff (x' - xphi)^2 + i pphi x' - i pphi xphi / 2 (see position_overlap)
    const cplx width = l * c - I * s / l;
    const cplx log_pref = 0.5 * std::log(std::exp(-I * delta) / (std::sqrt(pi) * width));
    const cplx coeff = (c / l - I * l * s) / (2.0 * width);
    const cplx a = coeff + 1.0 / (2.0 * lb * lb);
    const cplx centre = (2.0 * coeff * xphi + I * pphi) / (2.0 * a);
    const cplx omega = 1.0 / std::sqrt(a);
    const auto& rule = gauss_hermite(nodes);
    CVector amps = CVector::Zero(count);
    CVector poly(count);
    for (int i = 0; i < nodes; ++i) {
        const double t = rule.nodes[i];
        const cplx xp = centre + omega * t;
        const cplx u = xp / lb;
        const cplx dx = xp - xphi;
        // psi_k(u) = poly_k(u) exp(-u^2 / 2); every exponential is merged into one factor
        const cplx e = std::exp(log_pref - coeff * dx * dx + I * pphi * xp - 0.5 * I * pphi * xphi - 0.5 * u * u + t * t);
        poly(0) = std::pow(pi, -0.25);
        if (count > 1) poly(1) = std::numbers::sqrt2 * u * poly(0);
        for (int k = 1; k + 1 < count; ++k)
            poly(k + 1) = std::sqrt(2.0 / (k + 1)) * u * poly(k) - std::sqrt(static_cast<double>(k) / (k + 1)) * poly(k - 1);
        amps += (rule.weights[i] * e) * poly;
    }
    amps *= omega / std::sqrt(lb);
    if (!amps.allFinite()) throw RangeError("squeezed_state_in_basis: amplitudes overflow");
    return amps;
}

/// Density matrix in the number basis of `basis` frame, truncated at dim().
/// declared_tail records known probability mass outside the truncation.
class DensityOperator {
public:
    DensityOperator() = default;
    explicit DensityOperator(CMatrix elements, SqueezedFrame basis = {}, double declared_tail = 0.0)
        : elements_(std::move(elements)), basis_(basis), declared_tail_(declared_tail) {
        if (elements_.rows() != elements_.cols() || elements_.rows() == 0)
            throw std::invalid_argument("DensityOperator: matrix must be square and non-empty");
        if (declared_tail < 0.0 || declared_tail >= 1.0)
            throw std::invalid_argument("DensityOperator: declared tail must lie in [0, 1)");
    }

    static DensityOperator fock(int n, int dim, SqueezedFrame basis = {}) {
        if (n < 0 || n >= dim) throw std::invalid_argument("DensityOperator::fock: need 0 <= n < dim");
        CMatrix m = CMatrix::Zero(dim, dim);
        m(n, n) = 1.0;
        return DensityOperator(std::move(m), basis);
    }

    static DensityOperator pure(const CVector& psi, SqueezedFrame basis = {}, double declared_tail = 0.0) {
        return DensityOperator(psi * psi.adjoint(), basis, declared_tail);
    }

    /// Squeezed coherent state |x,p> of `basis` frame, truncated with its tail declared.
    static DensityOperator coherent(const SqueezedFrame& basis, const PhasePoint& pt, int dim) {
        const auto amps = coherent_amplitudes(basis, pt, dim);
        const double mass = amps.amplitudes.squaredNorm();
        return pure(amps.amplitudes, basis, std::max(0.0, 1.0 - mass));
    }

    /// Thermal state with the given mean occupation in the `basis` number basis.
    static DensityOperator thermal(double mean, int dim, SqueezedFrame basis = {}) {
        if (mean < 0.0) throw std::invalid_argument("DensityOperator::thermal: mean must be >= 0");
        CMatrix m = CMatrix::Zero(dim, dim);
        const double q = mean / (1.0 + mean);
        double pk = 1.0 / (1.0 + mean);
        for (int k = 0; k < dim; ++k, pk *= q) m(k, k) = pk;
        return DensityOperator(std::move(m), basis, std::pow(q, dim));
    }

    int dim() const noexcept { return static_cast<int>(elements_.rows()); }
    const CMatrix& elements() const noexcept { return elements_; }
    const SqueezedFrame& basis() const noexcept { return basis_; }
    double declared_tail() const noexcept { return declared_tail_; }

private:
    CMatrix elements_;
    SqueezedFrame basis_;
    double declared_tail_ = 0.0;
};

struct DensityReport {
    double hermiticity_defect = 0.0;
    double trace_defect = 0.0;
    double min_eigenvalue = 0.0;
    bool passes = false;
    std::string failure;  ///< names the failing defect, empty when passing
};

/// Hermiticity, trace (against 1 - declared tail) and positivity checks.
inline DensityReport validate_density(const DensityOperator& rho, double tol) {
    const CMatrix& m = rho.elements();
    DensityReport r;
    r.hermiticity_defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
    r.trace_defect = std::abs(m.trace() - cplx(1.0 - rho.declared_tail(), 0.0));
    const CMatrix herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
    r.min_eigenvalue = es.eigenvalues().minCoeff();
    if (r.hermiticity_defect > tol) r.failure = "hermiticity";
    else if (r.trace_defect > std::max(tol, 1e-10)) r.failure = "trace";
    else if (r.min_eigenvalue < -std::max(tol, 1e-10)) r.failure = "positivity";
    r.passes = r.failure.empty();
    return r;
}

struct GrowthBound {
    double k = 1.0;
    double alpha = 0.0;
};

/// A bounded-growth operator in the number basis of `basis`.
/// finite_rank marks matrices that are the whole operator (zero outside the
/// truncation); truncations of e.g. the identity are not finite rank.
class GeneralOperator {
public:
    GeneralOperator() = default;
    explicit GeneralOperator(CMatrix elements, SqueezedFrame basis = {}, bool finite_rank = true,
                             std::optional<GrowthBound> bound = std::nullopt)
        : elements_(std::move(elements)), basis_(basis), finite_rank_(finite_rank), bound_(bound) {
        if (elements_.rows() != elements_.cols() || elements_.rows() == 0)
            throw std::invalid_argument("GeneralOperator: matrix must be square and non-empty");
        if (bound_ && (bound_->alpha < 0.0 || bound_->alpha >= 1.0 || bound_->k <= 0.0))
            throw std::invalid_argument("GeneralOperator: growth bound needs K > 0 and 0 <= alpha < 1");
    }

    static GeneralOperator from_density(const DensityOperator& rho) {
        return GeneralOperator(rho.elements(), rho.basis(), true, GrowthBound{1.0, 0.0});
    }
    static GeneralOperator identity(int dim, SqueezedFrame basis = {}) {
        return GeneralOperator(CMatrix::Identity(dim, dim), basis, false, GrowthBound{1.0, 0.0});
    }
    static GeneralOperator number(int dim, SqueezedFrame basis = {}) {
        CMatrix m = CMatrix::Zero(dim, dim);
        for (int n = 0; n < dim; ++n) m(n, n) = n;
        return GeneralOperator(std::move(m), basis, false);
    }

    int dim() const noexcept { return static_cast<int>(elements_.rows()); }
    const CMatrix& elements() const noexcept { return elements_; }
    const SqueezedFrame& basis() const noexcept { return basis_; }
    bool finite_rank() const noexcept { return finite_rank_; }
    const std::optional<GrowthBound>& growth_bound() const noexcept { return bound_; }

    /// True when every column satisfies the declared (K n^alpha)^n bound.
    bool satisfies_declared_bound() const {
        if (!bound_) return true;
        for (int n = 1; n < dim(); ++n) {
            const double lim = n * (std::log(bound_->k) + bound_->alpha * std::log(static_cast<double>(n)));
            if (std::log(elements_.col(n).norm()) > lim + 1e-12) return false;
        }
        return true;
    }

private:
    CMatrix elements_;
    SqueezedFrame basis_;
    bool finite_rank_ = true;
    std::optional<GrowthBound> bound_;
};

struct ConvergenceEstimate {
    double k_fit = 1.0;
    double alpha_fit = 0.0;
    int max_n_checked = 0;
    bool passes = true;
};

/// Least-squares fit of log||A|n>|| / n against log K + alpha log n.
/// With six or more usable columns the fit also carries (log n)/n and 1/n terms,
/// which absorb polynomial prefactors (these do not affect convergence) so that
/// Stirling-type growth reads as alpha ~ 1 rather than a biased lower value.
inline ConvergenceEstimate estimate_growth(const GeneralOperator& a, double fit_tolerance = 0.05) {
    if (a.dim() < 4) throw std::invalid_argument("estimate_growth: need dim >= 4");
    std::vector<double> ns, ys;
    for (int n = 1; n < a.dim(); ++n) {
        const double norm = a.elements().col(n).norm();
        if (norm <= 0.0) continue;
        ns.push_back(n);
        ys.push_back(std::log(norm) / n);
    }
    ConvergenceEstimate est;
    est.max_n_checked = a.dim() - 1;
    if (ns.size() < 2) {
        est.k_fit = ys.empty() ? 0.0 : std::exp(ys.front());
        est.alpha_fit = 0.0;
        est.passes = true;
        return est;
    }
    const int cols = ns.size() >= 6 ? 4 : 2;
    Eigen::MatrixXd design(ns.size(), cols);
    Eigen::VectorXd rhs(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const double ln = std::log(ns[i]);
        design(i, 0) = 1.0;
        design(i, 1) = ln;
        if (cols == 4) {
            design(i, 2) = ln / ns[i];
            design(i, 3) = 1.0 / ns[i];
        }
        rhs(i) = ys[i];
    }
    const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(rhs);
    est.k_fit = std::exp(coef(0));
    est.alpha_fit = coef(1);
    est.passes = est.alpha_fit < 1.0 - fit_tolerance;
    return est;
}

}  // namespace husimi
