#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "husimi/errors.hpp"
#include "husimi/fock_core.hpp"
#include "husimi/husimi_transform.hpp"
#include "husimi/operator_polynomial.hpp"
#include "husimi/quadrature.hpp"

namespace husimi {

/// Gaussian factors smaller than this are not divided out.
inline constexpr double kDivisionFloor = 1e-280;

struct FrameCoefficients {
    double delta = 0.0;
    double b = 1.0;
    double c = 0.0;
    double d = 1.0;
    double f = 0.0;
};

inline FrameCoefficients frame_coefficients(const SqueezedFrame& frame, double phi) {
    const double l2 = frame.lambda() * frame.lambda();
    FrameCoefficients k;
    k.delta = frame.theta() - phi;
    const double cd = std::cos(k.delta), sd = std::sin(k.delta);
    k.b = l2 * cd * cd + sd * sd / l2;
    k.c = -(l2 - 1.0 / l2) * sd * cd;
    k.d = k.b * std::cos(phi) + k.c * std::sin(phi);
    k.f = k.b * std::sin(phi) - k.c * std::cos(phi);
    return k;
}

namespace detail {

inline void guard_division(double magnitude, const char* where) {
    if (!(magnitude >= kDivisionFloor))
        throw RangeError(std::string(where) + ": Gaussian factor to divide out underflows");
}

/// Integrates body over real (u, v) when the integrand is a polynomial times exp(E(u, v)) with
/// E quadratic. The contour is moved through the complex stationary point of E, which removes
/// the linear phase and with it the cancellation of an oscillatory Gaussian integral.
/// exponent(u, v) returns E; body(u, v, offset) returns the integrand times exp(offset).
/// Returns the integral times exp(-log_divisor).
template <typename E, typename B>
cplx integrate_through_saddle(E&& exponent, B&& body, cplx log_divisor, const QuadratureSpec& quad) {
    const cplx f00 = exponent(0.0, 0.0);
    const cplx fp0 = exponent(1.0, 0.0), fm0 = exponent(-1.0, 0.0);
    const cplx f0p = exponent(0.0, 1.0), f0m = exponent(0.0, -1.0);
    const cplx fpp = exponent(1.0, 1.0);
    // E = -(a u^2 + 2 b u v + c v^2) + d u + e v + const
    const cplx a = -0.5 * (fp0 + fm0 - 2.0 * f00), c = -0.5 * (f0p + f0m - 2.0 * f00);
    const cplx d = 0.5 * (fp0 - fm0), e = 0.5 * (f0p - f0m);
    const cplx b = -0.5 * ((fpp - f00) - d - e + a + c);
    const GaussianEnvelope2D env{a.real(), b.real(), c.real(), 0.0, 0.0};
    if (!env.decays()) throw NonIntegrableError("integrand does not decay on the real plane");
    const cplx det = a * c - b * b;
    const cplx u0 = 0.5 * (c * d - b * e) / det, v0 = 0.5 * (a * e - b * d) / det;
    return integrate_gaussian_2d(env, quad, [&](double t, double w) { return body(u0 + t, v0 + w, -log_divisor); });
}

}  // namespace detail

/// <x - y|rho|x + y>_phi from the continued field on the surface
/// (-v sin phi + i u d, v cos phi + i u f).
inline cplx xphi_element(const HusimiField& field, double phi, double x, double y, const QuadratureSpec& quad = {}) {
    field.check_tail();
    field.require_continuable();
    const auto k = frame_coefficients(field.frame(), phi);
    detail::guard_division(std::exp(-(x * x + y * y) / k.b), "xphi_element");
    const double sp = std::sin(phi), cp = std::cos(phi);
    auto zpm = [&](cplx u, cplx v) { return z_pm(field.frame(), CPhasePoint(-v * sp + I * u * k.d, v * cp + I * u * k.f)); };
    auto outer = [&](cplx u, cplx v) { return -2.0 * I * (u * x + v * y) - k.b * u * u; };
    const cplx integral = detail::integrate_through_saddle(
        [&](cplx u, cplx v) {
            const auto z = zpm(u, v);
            return outer(u, v) - z.minus * z.plus;
        },
        [&](cplx u, cplx v, cplx offset) {
            const auto z = zpm(u, v);
            return field.series(z.minus, z.plus, outer(u, v) + offset) / (2.0 * pi);
        },
        -(x * x + 2.0 * I * k.c * x * y + y * y) / k.b, quad);
    return std::sqrt(k.b / pi) * integral;
}

/// Q_{lambda theta}(x, p) resynthesised from an x_phi kernel K(x', y') = <x'-y'|rho|x'+y'>_phi.
inline double husimi_from_xphi(const SqueezedFrame& frame, double phi, const std::function<cplx(double, double)>& kernel,
                               double x, double p, const QuadratureSpec& quad = {}) {
    const auto k = frame_coefficients(frame, phi);
    const auto [xf, pf] = rotate_quadratures(x, p, phi);
    const double xphi = xf.real(), pphi = pf.real();
    const GaussianEnvelope2D env{1.0 / k.b, 0.0, 1.0 / k.b, 2.0 * xphi / k.b, 0.0};
    const cplx integral = integrate_gaussian_2d(env, quad, [&](double xp, double yp) {
        const double dx = xp - xphi;
        const cplx e = -(dx * dx + yp * yp) / k.b - 2.0 * I * k.c / k.b * yp * dx + 2.0 * I * pphi * yp;
        return std::exp(e) * kernel(xp, yp);
    });
    return (integral / (std::pow(pi, 1.5) * std::sqrt(k.b))).real();
}

/// Real samples of W on a uniform grid; values(i, j) at (xs[i], ps[j]).
struct WignerGrid {
    std::vector<double> xs;
    std::vector<double> ps;
    Eigen::MatrixXd values;

    double dx() const { return xs.size() > 1 ? xs[1] - xs[0] : 0.0; }
    double dp() const { return ps.size() > 1 ? ps[1] - ps[0] : 0.0; }

    /// Trapezoid mass.
    double mass() const {
        double s = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            for (std::size_t j = 0; j < ps.size(); ++j) {
                const double wi = (i == 0 || i + 1 == xs.size()) ? 0.5 : 1.0;
                const double wj = (j == 0 || j + 1 == ps.size()) ? 0.5 : 1.0;
                s += wi * wj * values(i, j);
            }
        return s * dx() * dp();
    }
};

inline std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw std::invalid_argument("linspace: need at least one point");
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return v;
}

/// (1/pi) int exp[-(x'_t - x_t)^2 / lambda^2 - lambda^2 (p'_t - p_t)^2] W dx' dp' on the grid (trapezoid).
inline double q_via_wigner_convolution(const WignerGrid& w, const SqueezedFrame& frame, double x, double p,
                                       double support_sigmas = 7.0) {
    if (w.xs.size() < 2 || w.ps.size() < 2) throw std::invalid_argument("q_via_wigner_convolution: grid too small");
    const double l = frame.lambda();
    const double c = std::cos(frame.theta()), s = std::sin(frame.theta());
    // Kernel standard deviations lambda/sqrt2 along x_theta and 1/(sqrt2 lambda) along p_theta.
    const double sx = l / std::numbers::sqrt2, sp = 1.0 / (std::numbers::sqrt2 * l);
    const double half_x = support_sigmas * std::hypot(c * sx, s * sp);
    const double half_p = support_sigmas * std::hypot(s * sx, c * sp);
    if (x - half_x < w.xs.front() || x + half_x > w.xs.back() || p - half_p < w.ps.front() ||
        p + half_p > w.ps.back())
        throw InsufficientSupportError("Wigner grid does not cover the smoothing kernel's support");
    const auto [xt, pt] = rotate_quadratures(x, p, frame.theta());
    double sum = 0.0;
    for (std::size_t i = 0; i < w.xs.size(); ++i) {
        const double wi = (i == 0 || i + 1 == w.xs.size()) ? 0.5 : 1.0;
        for (std::size_t j = 0; j < w.ps.size(); ++j) {
            const double wj = (j == 0 || j + 1 == w.ps.size()) ? 0.5 : 1.0;
            const auto [xr, pr] = rotate_quadratures(w.xs[i], w.ps[j], frame.theta());
            const double e = std::norm(xr - xt) / (l * l) + l * l * std::norm(pr - pt);
            sum += wi * wj * std::exp(-e) * w.values(i, j);
        }
    }
    return sum * w.dx() * w.dp() / pi;
}

struct STransformParams {
    double s = 0.0;
    SqueezedFrame frame;
};

/// A^{(s)} from the continuation on the imaginary plane (dividing the left Gaussian factor).
/// Keeps the field's mode: a density-mode field at s = 0 yields the Wigner function.
inline cplx s_transform_from_continuation(const HusimiField& field, const STransformParams& params, double x, double p,
                                          const QuadratureSpec& quad = {}) {
    if (!(params.s > -1.0)) throw std::invalid_argument("s-transform needs s > -1");
    if (!params.frame.same_as(field.frame(), 1e-13))
        throw std::invalid_argument("s-transform frame must match the field frame");
    field.check_tail();
    field.require_continuable();
    const double l = field.frame().lambda(), th = field.frame().theta();
    const double k = 1.0 / (1.0 + params.s);
    const auto [xt, pt] = rotate_quadratures(x, p, th);
    const double x0 = xt.real() / l, p0 = pt.real() * l;
    detail::guard_division(std::exp(-k * (x0 * x0 + p0 * p0)), "s_transform_from_continuation");
    auto zpm = [&](cplx u, cplx v) { return z_pm(field.frame(), CPhasePoint(I * u, I * v)); };
    auto outer = [&](cplx u, cplx v) {
        const auto [a, b] = rotate_quadratures(u, v, th);
        const cplx sa = a / l, sb = b * l;
        return -2.0 * I * k * (x0 * sa + p0 * sb) - k * (sa * sa + sb * sb);
    };
    const cplx integral = detail::integrate_through_saddle(
        [&](cplx u, cplx v) {
            const auto z = zpm(u, v);
            return outer(u, v) - z.minus * z.plus;
        },
        [&](cplx u, cplx v, cplx offset) {
            const auto z = zpm(u, v);
            return field.series(z.minus, z.plus, outer(u, v) + offset);
        },
        -k * (x0 * x0 + p0 * p0), quad);
    return field.prefactor() * k / pi * integral;
}

/// W(x, p) from the continued generalised Q-function on the imaginary plane.
inline double wigner_from_imaginary(const HusimiField& field, double x, double p, const QuadratureSpec& quad = {}) {
    if (field.mode() != FieldMode::density) throw std::invalid_argument("wigner_from_imaginary needs a density field");
    return s_transform_from_continuation(field, {0.0, field.frame()}, x, p, quad).real();
}

inline WignerGrid wigner_grid(const HusimiField& field, const std::vector<double>& xs, const std::vector<double>& ps,
                              const QuadratureSpec& quad = {}) {
    WignerGrid g{xs, ps, Eigen::MatrixXd(xs.size(), ps.size())};
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < ps.size(); ++j) g.values(i, j) = wigner_from_imaginary(field, xs[i], ps[j], quad);
    return g;
}

/// Generalised Laguerre L_n^{(a)}(t) by the three-term recurrence.
inline double laguerre(int n, int a, double t) {
    if (n == 0) return 1.0;
    double l0 = 1.0, l1 = 1.0 + a - t;
    for (int k = 1; k < n; ++k) {
        const double l2 = ((2.0 * k + 1.0 + a - t) * l1 - (k + a) * l0) / (k + 1.0);
        l0 = l1;
        l1 = l2;
    }
    return l1;
}

/// <m|D(alpha)|n> for m, n < dim.
inline CMatrix displacement_matrix(cplx alpha, int dim) {
    CMatrix d(dim, dim);
    const double t = std::norm(alpha);
    const double g = std::exp(-0.5 * t);
    for (int m = 0; m < dim; ++m)
        for (int n = 0; n < dim; ++n) {
            if (m >= n) {
                const double r = std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0)));
                d(m, n) = r * std::pow(alpha, m - n) * g * laguerre(n, m - n, t);
            } else {
                const double r = std::exp(0.5 * (std::lgamma(m + 1.0) - std::lgamma(n + 1.0)));
                d(m, n) = r * std::pow(-std::conj(alpha), n - m) * g * laguerre(m, n - m, t);
            }
        }
    return d;
}

/// A^{(s)} from its definition as a Fourier integral of Tr(D A).
/// Density mode divides by 2 pi, so rho at s = 0 gives W.
inline cplx s_transform_direct(const GeneralOperator& a, const STransformParams& params, double x, double p,
                               const QuadratureSpec& quad = {}, FieldMode mode = FieldMode::operator_) {
    if (!(params.s > -1.0)) throw std::invalid_argument("s-transform needs s > -1");
    if (!a.finite_rank())
        throw NonIntegrableError("Tr(D A) of an operator that is not finite rank is not a function; refused");
    const SqueezedFrame& basis = a.basis();
    const double l = params.frame.lambda(), th = params.frame.theta();
    auto weight = [&](double xp, double pp) {
        const auto [xt, pt] = rotate_quadratures(xp, pp, th);
        return 0.25 * params.s * (l * l * std::norm(pt) + std::norm(xt) / (l * l));
    };
    const auto env = GaussianEnvelope2D::fit([&](double xp, double pp) {
        return weight(xp, pp) - 0.5 * std::norm(z_of(basis, {xp, pp}));
    });
    if (!env.decays()) throw NonIntegrableError("s-transform integrand does not decay for this s");
    const cplx integral = integrate_gaussian_2d(env, quad, [&](double xp, double pp) {
        const CMatrix d = displacement_matrix(z_of(basis, {xp, pp}), a.dim());
        const cplx tr = (d.cwiseProduct(a.elements().transpose())).sum();
        return std::exp(I * (p * xp - x * pp) + weight(xp, pp)) * tr;
    });
    const cplx v = integral / (2.0 * pi);
    return mode == FieldMode::density ? v / (2.0 * pi) : v;
}

enum class GrowthVerdict { tempered_compatible, exponential_growth };

struct SExistenceReport {
    double quadratic_rate = 0.0;  ///< c2 in ln g ~ c0 + c1 ln R + c2 R^2, R = |z|
    double power = 0.0;           ///< c1
    GrowthVerdict verdict = GrowthVerdict::tempered_compatible;
    std::vector<double> radii;
    std::vector<double> log_g;    ///< ray-maximum of ln g per radius
};

/// Heuristic growth test of exp[s/(1+s)(x_t^2/lambda^2 + lambda^2 p_t^2)] <-x,-p|A|x,p> along rays.
/// Reports exponential growth when the fitted R^2 rate exceeds rate_tolerance.
inline SExistenceReport s_existence_diagnostic(const HusimiField& field, const STransformParams& params,
                                               std::vector<double> radii = {1, 2, 3, 4, 5, 6, 7, 8},
                                               int rays = 16, double rate_tolerance = 1e-2) {
    if (!field.native()) throw std::invalid_argument("s_existence_diagnostic: source must be in the field's basis");
    if (radii.size() < 4) throw std::invalid_argument("s_existence_diagnostic: need at least four radii");
    const double k = params.s / (1.0 + params.s);
    const int n = field.dim();
    SExistenceReport rep;
    rep.radii = radii;
    for (double r : radii) {
        double best = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < rays; ++j) {
            const cplx z = std::polar(r, 2.0 * pi * j / rays);
            // <-z|A|z> = exp(-|z|^2) sum A_nm (-zbar)^n z^m / sqrt(n! m!);  x_t^2/l^2 + l^2 p_t^2 = 2|z|^2
            const CVector u = scaled_powers(-std::conj(z), n);
            const CVector v = scaled_powers(z, n);
            const double poly = std::abs((u.transpose() * field.elements() * v)(0, 0));
            if (poly <= 0.0) continue;
            best = std::max(best, 2.0 * k * r * r - r * r + std::log(poly));
        }
        rep.log_g.push_back(best);
    }
    Eigen::MatrixXd design(radii.size(), 3);
    Eigen::VectorXd rhs(radii.size());
    int rows = 0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!std::isfinite(rep.log_g[i])) continue;
        design.row(rows) << 1.0, std::log(radii[i]), radii[i] * radii[i];
        rhs(rows++) = rep.log_g[i];
    }
    if (rows < 3) {
        rep.quadratic_rate = -std::numeric_limits<double>::infinity();
        return rep;
    }
    const Eigen::VectorXd c = design.topRows(rows).colPivHouseholderQr().solve(rhs.head(rows));
    rep.power = c(1);
    rep.quadratic_rate = c(2);
    rep.verdict = c(2) > rate_tolerance ? GrowthVerdict::exponential_growth : GrowthVerdict::tempered_compatible;
    return rep;
}

namespace detail {

inline void require_reference(const HusimiField& ref) {
    if (!ref.frame().same_as(SqueezedFrame::canonical(), 1e-13))
        throw std::invalid_argument("frame change needs the reference field in the lambda = 1, theta = 0 frame");
    ref.check_tail();
    ref.require_continuable();
}

}  // namespace detail

/// Q_{lambda theta} for lambda < 1 from the continued ordinary Q-function.
inline double frame_change_small_lambda(const HusimiField& ref, const SqueezedFrame& target, double x, double p,
                                        const QuadratureSpec& quad = {}, double epsilon = 1e-3) {
    detail::require_reference(ref);
    const double l = target.lambda();
    if (l >= 1.0 - epsilon)
        throw SingularFrameError("frame_change_small_lambda: lambda within epsilon of 1 (or above)");
    const double th = target.theta(), c = std::cos(th), s = std::sin(th);
    const double g = 1.0 - l * l, h = 1.0 / (l * l) - 1.0;
    const auto [xtc, ptc] = rotate_quadratures(x, p, th);
    const double xt = xtc.real(), pt = ptc.real();
    detail::guard_division(std::exp(-xt * xt / g), "frame_change_small_lambda");
    auto zpm = [&](cplx u, cplx v) { return z_pm(ref.frame(), CPhasePoint(-v * s + I * u * c, v * c + I * u * s)); };
    auto outer = [&](cplx u, cplx v) { return -2.0 * I * u * xt / g - (v - pt) * (v - pt) / h - u * u / g; };
    const cplx integral = detail::integrate_through_saddle(
        [&](cplx u, cplx v) {
            const auto z = zpm(u, v);
            return outer(u, v) - z.minus * z.plus;
        },
        [&](cplx u, cplx v, cplx offset) {
            const auto z = zpm(u, v);
            return ref.series(z.minus, z.plus, outer(u, v) + offset) / (2.0 * pi);
        },
        -xt * xt / g, quad);
    return (l / (pi * g) * integral).real();
}

/// Q_{lambda theta} for lambda > 1 from the continued ordinary Q-function.
inline double frame_change_large_lambda(const HusimiField& ref, const SqueezedFrame& target, double x, double p,
                                        const QuadratureSpec& quad = {}, double epsilon = 1e-3) {
    detail::require_reference(ref);
    const double l = target.lambda();
    if (l <= 1.0 + epsilon)
        throw SingularFrameError("frame_change_large_lambda: lambda within epsilon of 1 (or below)");
    const double th = target.theta(), c = std::cos(th), s = std::sin(th);
    const double g = 1.0 - 1.0 / (l * l), h = l * l - 1.0;
    const auto [xtc, ptc] = rotate_quadratures(x, p, th);
    const double xt = xtc.real(), pt = ptc.real();
    detail::guard_division(std::exp(-pt * pt / g), "frame_change_large_lambda");
    auto zpm = [&](cplx u, cplx v) { return z_pm(ref.frame(), CPhasePoint(v * c + I * u * s, v * s - I * u * c)); };
    auto outer = [&](cplx u, cplx v) { return 2.0 * I * u * pt / g - (v - xt) * (v - xt) / h - u * u / g; };
    const cplx integral = detail::integrate_through_saddle(
        [&](cplx u, cplx v) {
            const auto z = zpm(u, v);
            return outer(u, v) - z.minus * z.plus;
        },
        [&](cplx u, cplx v, cplx offset) {
            const auto z = zpm(u, v);
            return ref.series(z.minus, z.plus, outer(u, v) + offset) / (2.0 * pi);
        },
        -pt * pt / g, quad);
    return (integral / (l * pi * g)).real();
}

/// Weight of [(lambda^2 d_x^2 + lambda^-2 d_p^2)^r Q]_0 in the number probability.
inline double number_prob_coefficient(int n, int r) {
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(n - r + 1.0) - 2.0 * std::lgamma(r + 1.0) - r * std::log(2.0));
}

/// <n|rho|n>_{lambda 0} from exact derivatives of the field at the origin.
inline double number_prob_exact(const HusimiField& field, int n) {
    if (n < 0) throw std::invalid_argument("number_prob_exact: n must be >= 0");
    if (std::abs(std::remainder(field.frame().theta(), 2.0 * pi)) > 1e-13)
        throw std::invalid_argument("number probabilities from the origin need theta = 0");
    field.require_continuable();
    const int dim = field.dim();
    BivariatePoly g;
    g.coeffs = CMatrix(dim, dim);
    for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k)
            g.coeffs(j, k) = field.elements()(j, k) * std::exp(-0.5 * (std::lgamma(j + 1.0) + std::lgamma(k + 1.0)));
    // lambda^2 d_x^2 + lambda^-2 d_p^2 = 2 d_z d_zbar; 2 pi Q = exp(-z zbar) g in density mode.
    double total = 0.0;
    for (int r = 0; r <= n; ++r) {
        total += number_prob_coefficient(n, r) * std::pow(2.0, r) * g.coeffs(0, 0).real();
        g = g.gaussian_mixed_derivative();
    }
    return field.mode() == FieldMode::density ? total : total / (2.0 * pi);
}

struct FiniteDifferenceSpec {
    double h = 0.3;        ///< step in the scaled coordinates x / lambda, lambda p
    int half_width = 10;   ///< stencil nodes -half_width..half_width per axis
    double sample_noise = 0.0;             ///< declared noise per Q sample
    double instability_limit = 0.05;       ///< largest acceptable propagated noise
};

struct NumberProbEstimate {
    double value = 0.0;
    double noise_gain = 0.0;      ///< RMS output error per unit of i.i.d. sample noise
    double error_estimate = 0.0;  ///< noise_gain x max(declared noise, rounding floor)
};

/// <n|rho|n>_{lambda 0} from finite differences of Q samples around the origin.
/// sampler(x, p) returns Q_{lambda 0}(x, p) (density normalisation), possibly noisy.
inline NumberProbEstimate number_prob_from_origin(const SqueezedFrame& frame,
                                                  const std::function<double(double, double)>& sampler, int n,
                                                  const FiniteDifferenceSpec& fd = {}) {
    if (n < 0) throw std::invalid_argument("number_prob_from_origin: n must be >= 0");
    if (std::abs(std::remainder(frame.theta(), 2.0 * pi)) > 1e-13)
        throw std::invalid_argument("number probabilities from the origin need theta = 0");
    if (2 * fd.half_width < 2 * n) throw std::invalid_argument("number_prob_from_origin: stencil too narrow for n");
    const int m = fd.half_width, w = 2 * m + 1;
    std::vector<double> nodes(w);
    for (int i = 0; i < w; ++i) nodes[i] = fd.h * (i - m);
    const auto wts = fornberg_weights(0.0, nodes, 2 * n);
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(w, w);
    for (int r = 0; r <= n; ++r) {
        const double cr = number_prob_coefficient(n, r);
        double binom = 1.0;
        for (int k = 0; k <= r; ++k) {
            for (int i = 0; i < w; ++i)
                for (int j = 0; j < w; ++j) total(i, j) += cr * binom * wts[2 * k][i] * wts[2 * (r - k)][j];
            binom = binom * (r - k) / (k + 1.0);
        }
    }
    total *= 2.0 * pi;
    const double l = frame.lambda();
    NumberProbEstimate est;
    double peak = 0.0;
    for (int i = 0; i < w; ++i)
        for (int j = 0; j < w; ++j) {
            if (total(i, j) == 0.0) continue;
            const double q = sampler(l * nodes[i], nodes[j] / l);
            peak = std::max(peak, std::abs(q));
            est.value += total(i, j) * q;
        }
    est.noise_gain = total.norm();
    const double floor = 4.0 * std::numeric_limits<double>::epsilon() * peak;
    est.error_estimate = est.noise_gain * std::max(fd.sample_noise, floor);
    if (est.error_estimate > fd.instability_limit)
        throw InstabilityError("high-order finite difference dominated by sample noise", est.error_estimate);
    return est;
}

/// Noise-free field version of number_prob_from_origin.
inline NumberProbEstimate number_prob_from_origin(const HusimiField& field, int n, const FiniteDifferenceSpec& fd = {}) {
    if (field.mode() != FieldMode::density) throw std::invalid_argument("number_prob_from_origin needs a density field");
    return number_prob_from_origin(
        field.frame(), [&](double x, double p) { return husimi_real(field, x, p).real(); }, n, fd);
}

}  // namespace husimi
