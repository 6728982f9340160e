#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace husimi {

struct NnlsResult {
    Eigen::VectorXd x;
    int iterations = 0;
    bool hit_cap = false;
};

/// Lawson-Hanson active set NNLS on the normal equations:
///   min 1/2 x'Gx - h'x  subject to x >= 0,  with G = A'A, h = A'b.
///
/// The Cholesky factor of the passive block grows by one row per added index and
/// is rebuilt when indices leave. `ridge` (relative to the largest diagonal entry)
/// keeps nearly dependent columns from breaking the factorisation. Indices whose
/// pivot is still numerically zero are dropped from the candidate set.
inline NnlsResult nnls_gram(const Eigen::MatrixXd& g, const Eigen::VectorXd& h, int max_iterations = 0,
                            double ridge = 1e-12) {
    const int n = static_cast<int>(h.size());
    if (g.rows() != n || g.cols() != n) throw std::invalid_argument("nnls_gram: dimension mismatch");
    if (max_iterations <= 0) max_iterations = 3 * n;
    const double mu = ridge * g.diagonal().maxCoeff();
    const double tol = 1e-13 * std::max(1.0, h.cwiseAbs().maxCoeff());

    NnlsResult res;
    res.x = Eigen::VectorXd::Zero(n);
    std::vector<int> passive;
    std::vector<char> in_p(n, 0), banned(n, 0);
    Eigen::MatrixXd l(0, 0);

    auto gpp = [&](int i, int j) { return g(passive[i], passive[j]) + (i == j ? mu : 0.0); };
    auto rebuild = [&]() {
        const int k = static_cast<int>(passive.size());
        Eigen::MatrixXd m(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) m(i, j) = gpp(i, j);
        l = m.llt().matrixL();
    };
    // Appends index j; false if its pivot vanishes.
    auto append = [&](int j) {
        const int k = static_cast<int>(passive.size());
        Eigen::VectorXd col(k);
        for (int i = 0; i < k; ++i) col(i) = g(passive[i], j);
        Eigen::VectorXd y = k ? Eigen::VectorXd(l.triangularView<Eigen::Lower>().solve(col)) : Eigen::VectorXd();
        const double d2 = g(j, j) + mu - (k ? y.squaredNorm() : 0.0);
        if (!(d2 > 1e-14 * (g(j, j) + mu))) return false;
        Eigen::MatrixXd nl = Eigen::MatrixXd::Zero(k + 1, k + 1);
        nl.topLeftCorner(k, k) = l;
        if (k) nl.block(k, 0, 1, k) = y.transpose();
        nl(k, k) = std::sqrt(d2);
        l.swap(nl);
        passive.push_back(j);
        in_p[j] = 1;
        return true;
    };
    auto solve_passive = [&]() {
        const int k = static_cast<int>(passive.size());
        Eigen::VectorXd rhs(k);
        for (int i = 0; i < k; ++i) rhs(i) = h(passive[i]);
        Eigen::VectorXd y = l.triangularView<Eigen::Lower>().solve(rhs);
        return Eigen::VectorXd(l.transpose().triangularView<Eigen::Upper>().solve(y));
    };

    Eigen::VectorXd w = h;
    while (res.iterations < max_iterations) {
        int best = -1;
        double wmax = tol;
        for (int j = 0; j < n; ++j)
            if (!in_p[j] && !banned[j] && w(j) > wmax) {
                wmax = w(j);
                best = j;
            }
        if (best < 0) break;
        ++res.iterations;
        if (!append(best)) {
            banned[best] = 1;
            continue;
        }
        while (true) {
            const Eigen::VectorXd s = solve_passive();
            if (s.minCoeff() > 0.0) {
                for (std::size_t i = 0; i < passive.size(); ++i) res.x(passive[i]) = s(i);
                break;
            }
            double alpha = 1.0;
            for (std::size_t i = 0; i < passive.size(); ++i)
                if (s(i) <= 0.0) {
                    const double xi = res.x(passive[i]);
                    alpha = std::min(alpha, xi / (xi - s(i)));
                }
            for (std::size_t i = 0; i < passive.size(); ++i) res.x(passive[i]) += alpha * (s(i) - res.x(passive[i]));
            std::vector<int> keep;
            for (int j : passive) {
                if (res.x(j) <= 1e-15 * std::max(1.0, res.x.cwiseAbs().maxCoeff())) {
                    res.x(j) = 0.0;
                    in_p[j] = 0;
                } else {
                    keep.push_back(j);
                }
            }
            passive.swap(keep);
            rebuild();
            if (passive.empty()) break;
        }
        w = h - g * res.x;
    }
    res.hit_cap = res.iterations >= max_iterations;
    return res;
}

/// NNLS for min ||A x - b|| with x >= 0.
inline NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iterations = 0, double ridge = 1e-12) {
    const Eigen::MatrixXd g = a.transpose() * a;
    const Eigen::VectorXd h = a.transpose() * b;
    return nnls_gram(g, h, max_iterations, ridge);
}

}  // namespace husimi
