#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "husimi/errors.hpp"

namespace husimi {

using cplx = std::complex<double>;

/// Gauss-Hermite rule for the weight exp(-t^2).
///
/// `scaled_weights` holds w_i * exp(t_i^2) so that integrands which already
/// contain their own Gaussian can be summed directly:
///   int f(t) dt ~= sum_i scaled_weights[i] * f(nodes[i]).
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> scaled_weights;
};

namespace detail {

inline GaussHermiteRule build_gauss_hermite(int n) {
    // Newton iteration on orthonormal Hermite polynomials (Numerical Recipes gauher).
    constexpr double pim4 = 0.7511255444649425;  // pi^(-1/4)
    constexpr int max_iter = 100;
    GaussHermiteRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    rule.scaled_weights.assign(n, 0.0);
    const int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * rule.nodes[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * rule.nodes[1];
        } else {
            z = 2.0 * z - rule.nodes[i - 2];
        }
        double pp = 0.0;
        int its = 0;
        for (; its < max_iter; ++its) {
            double p1 = pim4;
            double p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        if (its == max_iter) throw std::runtime_error("gauss_hermite: Newton iteration did not converge");
        // Sorted ascending: index i from the top, mirrored.
        rule.nodes[i] = z;
        rule.nodes[n - 1 - i] = -z;
        const double w = 2.0 / (pp * pp);
        rule.weights[i] = rule.weights[n - 1 - i] = w;
        const double sw = std::exp(std::log(2.0) - 2.0 * std::log(std::abs(pp)) + z * z);
        rule.scaled_weights[i] = rule.scaled_weights[n - 1 - i] = sw;
    }
    std::vector<std::size_t> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return rule.nodes[a] < rule.nodes[b]; });
    GaussHermiteRule sorted;
    for (auto k : order) {
        sorted.nodes.push_back(rule.nodes[k]);
        sorted.weights.push_back(rule.weights[k]);
        sorted.scaled_weights.push_back(rule.scaled_weights[k]);
    }
    return sorted;
}

}  // namespace detail

/// Cached Gauss-Hermite rule with n nodes (1 <= n <= 400). Thread-safe.
inline const GaussHermiteRule& gauss_hermite(int n) {
    if (n < 1 || n > 400) throw std::invalid_argument("gauss_hermite: node count must be in [1, 400]");
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<GaussHermiteRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<GaussHermiteRule>(detail::build_gauss_hermite(n));
    return *slot;
}

/// Node-count and convergence settings for the Gaussian-adapted product rules.
struct QuadratureSpec {
    int nodes = 48;               ///< per-axis node count
    bool check_convergence = true;
    double tolerance = 1e-10;     ///< allowed absolute change under refinement
    double refinement = 1.5;      ///< node-count factor of the refined pass

    int refined_nodes() const {
        return std::min(400, static_cast<int>(std::ceil(nodes * refinement)));
    }
};

/// Real quadratic log-envelope of a 2D integrand:
///   log|f(u,v)| ~ -(a u^2 + 2 b u v + c v^2) + d u + e v + const.
struct GaussianEnvelope2D {
    double a = 0, b = 0, c = 0, d = 0, e = 0;

    /// Recovers the coefficients of an exactly quadratic function from six samples.
    static GaussianEnvelope2D fit(const std::function<double(double, double)>& log_env) {
        const double f00 = log_env(0, 0);
        const double fp0 = log_env(1, 0), fm0 = log_env(-1, 0);
        const double f0p = log_env(0, 1), f0m = log_env(0, -1);
        const double fpp = log_env(1, 1);
        GaussianEnvelope2D g;
        g.a = -0.5 * (fp0 + fm0 - 2 * f00);
        g.c = -0.5 * (f0p + f0m - 2 * f00);
        g.d = 0.5 * (fp0 - fm0);
        g.e = 0.5 * (f0p - f0m);
        // f(1,1) - f00 = -(a + 2b + c) + d + e
        g.b = -0.5 * ((fpp - f00) - g.d - g.e + g.a + g.c);
        return g;
    }

    bool decays() const { return a > 0 && c > 0 && a * c - b * b > 0; }
};

/// Integrates f over R^2 with a product Gauss-Hermite rule mapped onto the
/// principal axes of the integrand's Gaussian envelope. f must include its
/// own Gaussian decay. Throws NonIntegrableError if the envelope does not decay.
template <typename F>
cplx integrate_gaussian_2d(const GaussianEnvelope2D& env, int nodes, F&& f) {
    if (!env.decays()) throw NonIntegrableError("integrand envelope does not decay in every direction");
    Eigen::Matrix2d m;
    m << env.a, env.b, env.b, env.c;
    const Eigen::Vector2d rhs(0.5 * env.d, 0.5 * env.e);
    const Eigen::Vector2d center = m.ldlt().solve(rhs);
    const Eigen::LLT<Eigen::Matrix2d> llt(m);
    const Eigen::Matrix2d l = llt.matrixL();
    // w = center + L^{-T} s  =>  (w-c)^T M (w-c) = |s|^2
    const Eigen::Matrix2d map = l.transpose().inverse();
    const double jac = std::abs(map.determinant());
    const auto& rule = gauss_hermite(nodes);
    cplx sum = 0.0;
    for (int i = 0; i < nodes; ++i) {
        for (int j = 0; j < nodes; ++j) {
            const Eigen::Vector2d s(rule.nodes[i], rule.nodes[j]);
            const Eigen::Vector2d w = center + map * s;
            sum += rule.scaled_weights[i] * rule.scaled_weights[j] * f(w(0), w(1));
        }
    }
    return sum * jac;
}

/// integrate_gaussian_2d with the QuadratureSpec convergence contract applied.
template <typename F>
cplx integrate_gaussian_2d(const GaussianEnvelope2D& env, const QuadratureSpec& spec, F&& f) {
    const cplx coarse = integrate_gaussian_2d(env, spec.nodes, f);
    if (!spec.check_convergence) return coarse;
    const cplx fine = integrate_gaussian_2d(env, spec.refined_nodes(), f);
    const double change = std::abs(fine - coarse);
    if (change > spec.tolerance * std::max(1.0, std::abs(fine)))
        throw QuadratureError("2D Gauss-Hermite rule did not converge", change);
    return fine;
}

/// Finite-difference weights (Fornberg 1988) for derivatives 0..max_order at z0
/// on arbitrary nodes. Returns weights[k][j] for derivative k, node j.
inline std::vector<std::vector<double>> fornberg_weights(double z0, const std::vector<double>& x, int max_order) {
    const int n = static_cast<int>(x.size()) - 1;
    std::vector<std::vector<double>> c(max_order + 1, std::vector<double>(n + 1, 0.0));
    double c1 = 1.0;
    double c4 = x[0] - z0;
    c[0][0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        const int mn = std::min(i, max_order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - z0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c;
}

}  // namespace husimi
