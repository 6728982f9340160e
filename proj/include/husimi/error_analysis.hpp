#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "husimi/errors.hpp"
#include "husimi/fock_core.hpp"
#include "husimi/husimi_transform.hpp"
#include "husimi/quadrature.hpp"

namespace husimi {

/// Modified Bessel function I0: power series below 15, asymptotic series above.
inline double bessel_i0(double x) {
    if (!(x >= 0.0)) throw std::invalid_argument("bessel_i0: argument must be >= 0");
    if (x < 15.0) {
        const double q = 0.25 * x * x;
        double term = 1.0, sum = 1.0;
        for (int k = 1; k < 200; ++k) {
            term *= q / (static_cast<double>(k) * k);
            sum += term;
            if (term < 1e-17 * sum) break;
        }
        return sum;
    }
    // e^x / sqrt(2 pi x) * sum_k ((2k-1)!!)^2 / (k! (8x)^k)
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 100; ++k) {
        const double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
        if (next > term) break;
        term = next;
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return std::exp(x) / std::sqrt(2.0 * pi * x) * sum;
}

enum class NoiseModel { independent_derivatives, grid_sampled };

struct NoiseSpec {
    double sigma = 0.0;
    NoiseModel model = NoiseModel::independent_derivatives;

    NoiseSpec() = default;
    NoiseSpec(double s, NoiseModel m = NoiseModel::independent_derivatives) : sigma(s), model(m) {
        if (!(s >= 0.0)) throw std::invalid_argument("NoiseSpec: sigma must be >= 0");
    }
};

/// Taylor displacement (x + eta, p + zeta).
struct DisplacementPair {
    cplx eta;
    cplx zeta;
};

/// sigma [I0(2|eta|/lambda) I0(2 lambda |zeta|)]^(1/2).
inline double delta_q(double sigma, double lambda, const DisplacementPair& d) {
    if (!(sigma >= 0.0) || !(lambda > 0.0)) throw std::invalid_argument("delta_q: need sigma >= 0, lambda > 0");
    return sigma * std::sqrt(bessel_i0(2.0 * std::abs(d.eta) / lambda) * bessel_i0(2.0 * lambda * std::abs(d.zeta)));
}

/// Taylor coefficients c(n, m) = d^{n+m} Q / dx^n dp^m / (n! m!) at (x, p), total order <= order.
struct DerivativeTable {
    double x = 0.0;
    double p = 0.0;
    int order = 0;
    CMatrix coeffs;

    cplx derivative(int n, int m) const {
        return coeffs(n, m) * std::exp(std::lgamma(n + 1.0) + std::lgamma(m + 1.0));
    }
};

namespace detail {

/// Truncated bivariate power series in (u, v), total degree <= k.
struct Series2D {
    int k = 0;
    CMatrix c;

    explicit Series2D(int order, cplx constant = 0.0) : k(order), c(CMatrix::Zero(order + 1, order + 1)) {
        c(0, 0) = constant;
    }

    /// this * (a0 + a1 u + a2 v)
    Series2D times_linear(cplx a0, cplx a1, cplx a2) const {
        Series2D out(k);
        for (int i = 0; i <= k; ++i)
            for (int j = 0; i + j <= k; ++j) {
                cplx s = a0 * c(i, j);
                if (i > 0) s += a1 * c(i - 1, j);
                if (j > 0) s += a2 * c(i, j - 1);
                out.c(i, j) = s;
            }
        return out;
    }

    Series2D times(const Series2D& o) const {
        Series2D out(k);
        for (int i = 0; i <= k; ++i)
            for (int j = 0; i + j <= k; ++j) {
                if (c(i, j) == 0.0) continue;
                for (int a = 0; i + a <= k; ++a)
                    for (int b = 0; i + a + j + b <= k; ++b) out.c(i + a, j + b) += c(i, j) * o.c(a, b);
            }
        return out;
    }

    /// exp(q) for q = q00 + q10 u + q01 v + q20 u^2 + q11 u v + q02 v^2.
    static Series2D exp_quadratic(int k, cplx q00, cplx q10, cplx q01, cplx q20, cplx q11, cplx q02) {
        Series2D e(k);
        e.c(0, 0) = std::exp(q00);
        for (int j = 0; j < k; ++j) {
            cplx s = q01 * e.c(0, j);
            if (j > 0) s += 2.0 * q02 * e.c(0, j - 1);
            e.c(0, j + 1) = s / static_cast<double>(j + 1);
        }
        for (int i = 0; i < k; ++i)
            for (int j = 0; i + 1 + j <= k; ++j) {
                cplx s = q10 * e.c(i, j);
                if (i > 0) s += 2.0 * q20 * e.c(i - 1, j);
                if (j > 0) s += q11 * e.c(i, j - 1);
                e.c(i + 1, j) = s / static_cast<double>(i + 1);
            }
        return e;
    }
};

}  // namespace detail

/// Exact Taylor coefficients of the continued field at a real point, from its Fock-series form.
inline DerivativeTable derivative_table(const HusimiField& field, double x, double p, int order) {
    if (order < 0) throw std::invalid_argument("derivative_table: order must be >= 0");
    field.require_continuable();
    const auto z0 = z_pm(field.frame(), CPhasePoint(PhasePoint{x, p}));
    const auto du = z_pm(field.frame(), CPhasePoint(cplx(1.0), cplx(0.0)));
    const auto dv = z_pm(field.frame(), CPhasePoint(cplx(0.0), cplx(1.0)));
    const int n = field.dim();
    // sum_n zm^n (sum_m A~_nm zp^m), Horner in both.
    detail::Series2D poly(order);
    for (int r = n - 1; r >= 0; --r) {
        detail::Series2D inner(order);
        for (int m = n - 1; m >= 0; --m) {
            const double norm = std::exp(-0.5 * (std::lgamma(r + 1.0) + std::lgamma(m + 1.0)));
            inner = inner.times_linear(z0.plus, du.plus, dv.plus);
            inner.c(0, 0) += field.elements()(r, m) * norm;
        }
        poly = poly.times_linear(z0.minus, du.minus, dv.minus);
        poly.c += inner.c;
    }
    // -zm zp = -(m0 + m1 u + m2 v)(p0 + p1 u + p2 v)
    const cplx m0 = z0.minus, m1 = du.minus, m2 = dv.minus;
    const cplx p0 = z0.plus, p1 = du.plus, p2 = dv.plus;
    const auto e = detail::Series2D::exp_quadratic(order, -m0 * p0, -(m0 * p1 + m1 * p0), -(m0 * p2 + m2 * p0),
                                                   -m1 * p1, -(m1 * p2 + m2 * p1), -m2 * p2);
    DerivativeTable t;
    t.x = x;
    t.p = p;
    t.order = order;
    t.coeffs = e.times(poly).c * field.prefactor();
    return t;
}

struct TaylorResult {
    cplx value;
    double remainder = 0.0;  ///< size of the last retained order, doubled
};

/// Partial Taylor sum at (x + eta, p + zeta). Throws TruncationError if the
/// remainder estimate exceeds tolerance.
inline TaylorResult taylor_continuation(const DerivativeTable& t, const DisplacementPair& d,
                                        double tolerance = std::numeric_limits<double>::infinity()) {
    TaylorResult r;
    cplx en = 1.0;
    double last = 0.0;
    for (int n = 0; n <= t.order; ++n) {
        cplx zm = 1.0;
        for (int m = 0; n + m <= t.order; ++m) {
            const cplx term = t.coeffs(n, m) * en * zm;
            r.value += term;
            if (n + m == t.order) last += std::abs(term);
            zm *= d.zeta;
        }
        en *= d.eta;
    }
    r.remainder = 2.0 * last;
    if (r.remainder > tolerance) throw TruncationError("Taylor continuation order too low", r.remainder);
    return r;
}

/// Portable normal variates: mt19937_64 (output fixed by the standard) seeded
/// through splitmix64, with an explicit Box-Muller transform.
class PortableNormal {
public:
    explicit PortableNormal(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    /// Independent stream for trial `index` of an experiment seeded with `seed`.
    static PortableNormal substream(std::uint64_t seed, std::uint64_t index) {
        return PortableNormal(splitmix64(seed) ^ (index * 0xD1342543DE82EF95ULL + 1));
    }

    double uniform() {
        // (0, 1]: never zero, so log is safe
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    }

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double a = 2.0 * pi * uniform();
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

struct MonteCarloSpec {
    int trials = 10000;
    std::uint64_t seed = 20240601;
    int order = 0;               ///< Taylor order; 0 picks one from the largest displacement
    int grid_half_width = 6;     ///< grid-sampled model: stencil nodes per side
    double grid_step = 0.25;     ///< grid-sampled model: sample spacing
};

struct ErrorGrowthRow {
    DisplacementPair disp;
    double rms = 0.0;
    double predicted = 0.0;  ///< delta_q for the independent-derivative model
};

/// RMS error of the Taylor continuation from noisy derivative data.
///
/// independent_derivatives: each d^{n+m}Q/dx^n dp^m is perturbed by
/// sigma lambda^{m-n} g with g standard normal; by linearity the continuation
/// error is the Taylor sum of the perturbations.
/// grid_sampled: Q samples on a small grid get sigma g each, derivatives come
/// from finite differences, and the error is measured against the exact continuation.
inline std::vector<ErrorGrowthRow> monte_carlo_error_growth(const HusimiField& field, double x, double p,
                                                            const NoiseSpec& noise,
                                                            const std::vector<DisplacementPair>& disps,
                                                            const MonteCarloSpec& spec = {}) {
    if (spec.trials < 100) throw std::invalid_argument("monte_carlo_error_growth: need at least 100 trials");
    const double l = field.frame().lambda();
    double reach = 0.0;
    for (const auto& d : disps) reach = std::max({reach, std::abs(d.eta) / l, std::abs(d.zeta) * l});
    std::vector<ErrorGrowthRow> rows(disps.size());
    std::vector<double> sq(disps.size(), 0.0);
    for (std::size_t k = 0; k < disps.size(); ++k) {
        rows[k].disp = disps[k];
        rows[k].predicted = delta_q(noise.sigma, l, disps[k]);
    }

    if (noise.model == NoiseModel::independent_derivatives) {
        const int order = spec.order > 0 ? spec.order : static_cast<int>(std::ceil(3.0 * reach)) + 25;
        DerivativeTable t;
        t.order = order;
        t.coeffs = CMatrix::Zero(order + 1, order + 1);
        // sigma lambda^{m-n} / (n! m!)
        Eigen::MatrixXd scale = Eigen::MatrixXd::Zero(order + 1, order + 1);
        for (int n = 0; n <= order; ++n)
            for (int m = 0; n + m <= order; ++m)
                scale(n, m) = noise.sigma * std::exp((m - n) * std::log(l) - std::lgamma(n + 1.0) - std::lgamma(m + 1.0));
        for (int trial = 0; trial < spec.trials; ++trial) {
            auto rng = PortableNormal::substream(spec.seed, trial);
            for (int n = 0; n <= order; ++n)
                for (int m = 0; n + m <= order; ++m) t.coeffs(n, m) = scale(n, m) * rng();
            for (std::size_t k = 0; k < disps.size(); ++k)
                sq[k] += std::norm(taylor_continuation(t, disps[k]).value);
        }
    } else {
        const int mw = spec.grid_half_width, w = 2 * mw + 1;
        const int order = spec.order > 0 ? std::min(spec.order, 2 * mw) : 2 * mw;
        std::vector<double> nodes(w);
        for (int i = 0; i < w; ++i) nodes[i] = spec.grid_step * (i - mw);
        const auto wts = fornberg_weights(0.0, nodes, order);
        Eigen::MatrixXd clean(w, w);
        for (int i = 0; i < w; ++i)
            for (int j = 0; j < w; ++j) clean(i, j) = husimi_real(field, x + nodes[i], p + nodes[j]).real();
        std::vector<cplx> exact(disps.size());
        for (std::size_t k = 0; k < disps.size(); ++k)
            exact[k] = husimi_continued(field, CPhasePoint(x + disps[k].eta, p + disps[k].zeta));
        DerivativeTable t;
        t.order = order;
        t.coeffs = CMatrix::Zero(order + 1, order + 1);
        Eigen::MatrixXd samples(w, w);
        for (int trial = 0; trial < spec.trials; ++trial) {
            auto rng = PortableNormal::substream(spec.seed, trial);
            for (int i = 0; i < w; ++i)
                for (int j = 0; j < w; ++j) samples(i, j) = clean(i, j) + noise.sigma * rng();
            for (int n = 0; n <= order; ++n) {
                Eigen::VectorXd dx = Eigen::VectorXd::Zero(w);
                for (int i = 0; i < w; ++i) dx += wts[n][i] * samples.row(i).transpose();
                for (int m = 0; n + m <= order; ++m) {
                    double v = 0.0;
                    for (int j = 0; j < w; ++j) v += wts[m][j] * dx(j);
                    t.coeffs(n, m) = v * std::exp(-std::lgamma(n + 1.0) - std::lgamma(m + 1.0));
                }
            }
            for (std::size_t k = 0; k < disps.size(); ++k)
                sq[k] += std::norm(taylor_continuation(t, disps[k]).value - exact[k]);
        }
    }
    for (std::size_t k = 0; k < disps.size(); ++k) rows[k].rms = std::sqrt(sq[k] / spec.trials);
    return rows;
}

}  // namespace husimi
