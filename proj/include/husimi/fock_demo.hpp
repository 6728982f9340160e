#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "husimi/errors.hpp"
#include "husimi/fock_core.hpp"
#include "husimi/husimi_transform.hpp"
#include "husimi/nnls.hpp"
#include "husimi/reconstruction.hpp"

namespace husimi {

/// Physicists' Hermite polynomial H_n(z).
inline cplx hermite_poly(int n, cplx z) {
    if (n < 0) throw std::invalid_argument("hermite_poly: n must be >= 0");
    cplx h0 = 1.0;
    if (n == 0) return h0;
    cplx h1 = 2.0 * z;
    for (int k = 1; k < n; ++k) {
        const cplx h2 = 2.0 * z * h1 - 2.0 * static_cast<double>(k) * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

/// Ordinary Q-function of |n>, as a function of the classical energy E = (x^2 + p^2) / 2.
inline double q_fock(int n, double energy) {
    if (n < 0 || energy < 0.0) throw std::invalid_argument("q_fock: need n >= 0 and E >= 0");
    if (energy == 0.0) return n == 0 ? 1.0 / (2.0 * pi) : 0.0;
    return std::exp(n * std::log(energy) - energy - std::lgamma(n + 1.0)) / (2.0 * pi);
}

/// Q_{lambda theta} of the Fock state |n> (number state of the lambda = 1 frame).
///
/// The Hermite argument is (-cosech 2 eta)^(1/2) z with the principal root: real for
/// lambda < 1, imaginary for lambda > 1. Near lambda = 1 use q_fock.
inline double q_fock_general(int n, const SqueezedFrame& frame, double x, double p, double epsilon = 1e-3) {
    if (n < 0) throw std::invalid_argument("q_fock_general: n must be >= 0");
    if (std::abs(frame.lambda() - 1.0) <= epsilon)
        throw SingularFrameError("q_fock_general: lambda within epsilon of 1; use q_fock");
    const double eta = frame.eta(), l = frame.lambda();
    const auto [xc, pc] = rotate_quadratures(x, p, frame.theta());
    const double xt = xc.real(), pt = pc.real();
    const cplx z = (xt / l + I * l * pt) / std::numbers::sqrt2;
    const double sech = 1.0 / std::cosh(eta);
    const cplx scale = std::sqrt(cplx(-1.0 / std::sinh(2.0 * eta), 0.0));
    const double h = std::norm(hermite_poly(n, scale * z));
    const double logpre = std::log(sech) + n * std::log(std::abs(std::tanh(eta))) - (n + 1) * std::log(2.0) -
                          std::log(pi) - std::lgamma(n + 1.0);
    return std::exp(logpre - 0.5 * sech * (xt * xt / l + l * pt * pt)) * h;
}

/// Small-lambda form (lambda / sqrt(pi)) exp(-lambda^2 p_t^2) <x_t|rho|x_t>_theta,
/// with the position diagonal supplied as a function of x_theta.
inline double q_fock_asymptotic(const SqueezedFrame& frame, const std::function<double(double)>& position_diagonal,
                                double x, double p) {
    const double l = frame.lambda();
    const auto [xc, pc] = rotate_quadratures(x, p, frame.theta());
    const double pt = pc.real();
    return l / std::sqrt(pi) * std::exp(-l * l * pt * pt) * position_diagonal(xc.real());
}

/// Same, with the diagonal reconstructed from a continued density field.
inline double q_fock_asymptotic(const HusimiField& source, const SqueezedFrame& frame, double x, double p,
                                const QuadratureSpec& quad = {}) {
    return q_fock_asymptotic(
        frame, [&](double xt) { return xphi_element(source, frame.theta(), xt, 0.0, quad).real(); }, x, p);
}

/// Nonnegative mixture of Gaussians with unit total mass.
class ClassicalDistribution {
public:
    struct Component {
        double weight;
        Eigen::Vector2d mean;
        Eigen::Matrix2d cov;
    };

    ClassicalDistribution() = default;
    explicit ClassicalDistribution(std::vector<Component> parts, double mass_tolerance = 1e-8)
        : parts_(std::move(parts)) {
        double mass = 0.0;
        for (const auto& c : parts_) {
            if (c.weight < 0.0) throw std::invalid_argument("ClassicalDistribution: negative weight");
            if (c.cov.determinant() <= 0.0 || c.cov(0, 0) <= 0.0)
                throw std::invalid_argument("ClassicalDistribution: covariance must be positive definite");
            mass += c.weight;
        }
        if (std::abs(mass - 1.0) > mass_tolerance) throw std::invalid_argument("ClassicalDistribution: mass must be 1");
    }

    static ClassicalDistribution gaussian(double x0, double p0, double var_x, double var_p) {
        Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
        cov(0, 0) = var_x;
        cov(1, 1) = var_p;
        return ClassicalDistribution({{1.0, Eigen::Vector2d(x0, p0), cov}});
    }

    const std::vector<Component>& components() const noexcept { return parts_; }

    double operator()(double x, double p) const {
        double s = 0.0;
        for (const auto& c : parts_) s += c.weight * normal_pdf(Eigen::Vector2d(x, p) - c.mean, c.cov);
        return s;
    }

    static double normal_pdf(const Eigen::Vector2d& d, const Eigen::Matrix2d& cov) {
        return std::exp(-0.5 * d.dot(cov.inverse() * d)) / (2.0 * pi * std::sqrt(cov.determinant()));
    }

private:
    std::vector<Component> parts_;
};

/// Covariance of the frame's smoothing kernel (1/pi) exp[-x_t^2/lambda^2 - lambda^2 p_t^2] in (x, p).
inline Eigen::Matrix2d smoothing_covariance(const SqueezedFrame& frame) {
    const double l = frame.lambda(), c = std::cos(frame.theta()), s = std::sin(frame.theta());
    Eigen::Matrix2d r;
    r << c, s, -s, c;
    Eigen::Matrix2d d = Eigen::Matrix2d::Zero();
    d(0, 0) = 0.5 * l * l;
    d(1, 1) = 0.5 / (l * l);
    return r.transpose() * d * r;
}

/// Gaussian smoothing of a classical distribution with the frame's kernel (exact for mixtures).
inline double classical_smoothing(const ClassicalDistribution& gamma, const SqueezedFrame& frame, double x, double p) {
    const Eigen::Matrix2d k = smoothing_covariance(frame);
    double s = 0.0;
    for (const auto& c : gamma.components())
        s += c.weight * ClassicalDistribution::normal_pdf(Eigen::Vector2d(x, p) - c.mean, c.cov + k);
    return s;
}

struct FigureSeries {
    std::vector<double> xs;
    std::vector<double> ps;
    Eigen::MatrixXd values;  ///< values(i, j) at (xs[i], ps[j])
    std::map<std::string, std::string> metadata;
};

/// Q_{lambda theta} of |n> on a grid, from the closed forms.
inline FigureSeries fock_figure(int n, const SqueezedFrame& frame, const std::vector<double>& xs,
                                const std::vector<double>& ps) {
    FigureSeries f{xs, ps, Eigen::MatrixXd(xs.size(), ps.size()), {}};
    const bool ordinary = std::abs(frame.lambda() - 1.0) <= 1e-3;
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < ps.size(); ++j)
            f.values(i, j) = ordinary ? q_fock(n, 0.5 * (xs[i] * xs[i] + ps[j] * ps[j]))
                                      : q_fock_general(n, frame, xs[i], ps[j]);
    f.metadata["n"] = std::to_string(n);
    f.metadata["formula"] = ordinary ? "q_fock" : "q_fock_general";
    return f;
}

struct ComplementaritySpec {
    double blob_variance = 0.04;  ///< variance of each nonnegative Gaussian blob in Gamma
    double spacing = 0.25;        ///< blob centre lattice spacing
    double radius = 3.5;          ///< blob centres lie in this disc
    int samples = 41;             ///< data points per axis per frame
    int max_iterations = 0;       ///< active-set cap; 0 means 3 x unknowns
    double ridge = 1e-12;
};

struct ComplementarityReport {
    std::vector<double> single_residuals;  ///< relative L2 residual of the best Gamma per frame
    double joint_residual = 0.0;           ///< one Gamma for all frames
    double ratio = 0.0;                    ///< joint / max single
    int unknowns = 0;
    int iterations = 0;                    ///< joint fit active-set iterations
    bool hit_cap = false;
    std::string method = "lawson-hanson active set, normal equations";
};

/// Fits nonnegative classical distributions (Gaussian blob mixtures) whose
/// smoothings reproduce Q_{lambda theta} of rho, per frame and jointly.
inline ComplementarityReport complementarity_report(const DensityOperator& rho, const std::vector<SqueezedFrame>& frames,
                                                    const ComplementaritySpec& spec = {}) {
    if (frames.size() < 2) throw std::invalid_argument("complementarity_report: need at least two frames");
    std::vector<Eigen::Vector2d> centres;
    const int half = static_cast<int>(std::floor(spec.radius / spec.spacing + 1e-9));
    for (int i = -half; i <= half; ++i)
        for (int j = -half; j <= half; ++j) {
            const Eigen::Vector2d c(i * spec.spacing, j * spec.spacing);
            if (c.norm() <= spec.radius + 1e-9) centres.push_back(c);
        }
    const int nb = static_cast<int>(centres.size());
    std::vector<Eigen::MatrixXd> blocks;
    std::vector<Eigen::VectorXd> targets;
    for (const auto& f : frames) {
        const HusimiField field(f, rho);
        const Eigen::Matrix2d cov = smoothing_covariance(f) + spec.blob_variance * Eigen::Matrix2d::Identity();
        const Eigen::Matrix2d inv = cov.inverse();
        const double norm = 1.0 / (2.0 * pi * std::sqrt(cov.determinant()));
        const double l = f.lambda(), c = std::cos(f.theta()), s = std::sin(f.theta());
        const double rx = spec.radius + 3.0 * l / std::numbers::sqrt2 + 1.0;
        const double rp = spec.radius + 3.0 / (std::numbers::sqrt2 * l) + 1.0;
        const auto us = linspace(-rx, rx, spec.samples), vs = linspace(-rp, rp, spec.samples);
        const double wt = std::sqrt((us[1] - us[0]) * (vs[1] - vs[0]));
        const int rows = spec.samples * spec.samples;
        Eigen::MatrixXd a(rows, nb);
        Eigen::VectorXd q(rows);
        int r = 0;
        for (double u : us)
            for (double v : vs) {
                // (u, v) are (x_theta, p_theta)
                const Eigen::Vector2d w(c * u - s * v, s * u + c * v);
                q(r) = wt * husimi_real(field, w(0), w(1)).real();
                for (int k = 0; k < nb; ++k) {
                    const Eigen::Vector2d d = w - centres[k];
                    a(r, k) = wt * norm * std::exp(-0.5 * d.dot(inv * d));
                }
                ++r;
            }
        blocks.push_back(std::move(a));
        targets.push_back(std::move(q));
    }
    ComplementarityReport rep;
    rep.unknowns = nb;
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(nb, nb);
    Eigen::VectorXd h = Eigen::VectorXd::Zero(nb);
    for (std::size_t f = 0; f < frames.size(); ++f) {
        const Eigen::MatrixXd gf = blocks[f].transpose() * blocks[f];
        const Eigen::VectorXd hf = blocks[f].transpose() * targets[f];
        const auto fit = nnls_gram(gf, hf, spec.max_iterations, spec.ridge);
        rep.single_residuals.push_back((blocks[f] * fit.x - targets[f]).norm() / targets[f].norm());
        gram += gf;
        h += hf;
    }
    const auto joint = nnls_gram(gram, h, spec.max_iterations, spec.ridge);
    double num = 0.0, den = 0.0;
    for (std::size_t f = 0; f < frames.size(); ++f) {
        num += (blocks[f] * joint.x - targets[f]).squaredNorm();
        den += targets[f].squaredNorm();
    }
    rep.joint_residual = std::sqrt(num / den);
    rep.iterations = joint.iterations;
    rep.hit_cap = joint.hit_cap;
    rep.ratio = rep.joint_residual / *std::max_element(rep.single_residuals.begin(), rep.single_residuals.end());
    return rep;
}

}  // namespace husimi
