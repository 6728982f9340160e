#include "husimi/fock_demo.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace husimi;

TEST(HermitePoly, Examples) {
    EXPECT_EQ(hermite_poly(0, 0.3), cplx(1.0));
    EXPECT_LT(std::abs(hermite_poly(1, cplx(0.3, 1.0)) - cplx(0.6, 2.0)), 1e-15);
    for (cplx z : {cplx(0.5, 0.0), cplx(-1.2, 0.7), cplx(0.0, 2.0)}) {
        EXPECT_LT(std::abs(hermite_poly(3, z) - (8.0 * z * z * z - 12.0 * z)), 1e-12);
        EXPECT_LT(std::abs(hermite_poly(4, z) - (16.0 * std::pow(z, 4) - 48.0 * z * z + 12.0)), 1e-12);
    }
    EXPECT_THROW(hermite_poly(-1, 0.0), std::invalid_argument);
}

TEST(QFock, OrdinaryFrame) {
    EXPECT_DOUBLE_EQ(q_fock(0, 0.0), 1.0 / (2 * pi));
    EXPECT_EQ(q_fock(3, 0.0), 0.0);
    for (int n : {0, 1, 4, 9}) {
        const HusimiField q(SqueezedFrame(), DensityOperator::fock(n, n + 1));
        for (auto [x, p] : {std::pair{0.3, -0.4}, {1.5, 2.0}})
            EXPECT_NEAR(q_fock(n, 0.5 * (x * x + p * p)), husimi_real(q, x, p).real(), 1e-15);
    }
    EXPECT_THROW(q_fock(1, -0.1), std::invalid_argument);
}

TEST(QFockGeneral, MatchesFockSumAndOracle) {
    for (int n : {0, 1, 2, 5, 8})
        for (auto [l, t] : {std::pair{0.25, 0.0}, {0.25, 0.7}, {0.5, pi / 4}, {2.0, 1.0}}) {
            const SqueezedFrame f(l, t);
            const HusimiField q(f, DensityOperator::fock(n, n + 1));
            // (3, 3) is far out along the long axis of the lambda = 0.25 frames
            for (auto [x, p] : {std::pair{0.0, 0.0}, {0.7, -0.3}, {-1.4, 1.1}, {3.0, 3.0}}) {
                const double v = q_fock_general(n, f, x, p);
                EXPECT_NEAR(v, husimi_real(q, x, p).real(), 1e-13) << n << " " << l;
                if (n <= 2) {
                    CMatrix rho = CMatrix::Zero(n + 1, n + 1);
                    rho(n, n) = 1.0;
                    EXPECT_NEAR(v, oracle::husimi(rho, l, t, x, p), 1e-8);
                }
            }
        }
    EXPECT_THROW(q_fock_general(1, SqueezedFrame(1.0005, 0.0), 0, 0), SingularFrameError);
}

TEST(QFockAsymptotic, ApproachesNarrowFrames) {
    const int n = 3;
    auto diag = [](double xt) { return std::pow(oracle::hermite_fns(xt, n + 1)[n], 2); };
    double previous = 1e300;
    for (double l : {0.2, 0.1, 0.05}) {
        const SqueezedFrame f(l, 0.4);
        double worst = 0.0, peak = 0.0;
        for (double x : linspace(-3, 3, 13))
            for (double p : linspace(-3, 3, 13)) {
                const double exact = q_fock_general(n, f, x, p);
                worst = std::max(worst, std::abs(q_fock_asymptotic(f, diag, x, p) - exact));
                peak = std::max(peak, exact);
            }
        EXPECT_LT(worst / peak, previous);
        previous = worst / peak;
    }
    EXPECT_LT(previous, 0.02);

    const HusimiField src(SqueezedFrame(), DensityOperator::fock(n, n + 1));
    const SqueezedFrame f(0.3, 0.9);
    for (auto [x, p] : {std::pair{0.2, 0.5}, {-1.0, 0.3}})
        EXPECT_NEAR(q_fock_asymptotic(src, f, x, p), q_fock_asymptotic(f, diag, x, p), 1e-8);
}

TEST(ClassicalDistribution, Validation) {
    Eigen::Matrix2d cov = Eigen::Matrix2d::Identity();
    EXPECT_THROW(ClassicalDistribution({{1.2, Eigen::Vector2d::Zero(), cov}}), std::invalid_argument);
    EXPECT_THROW(ClassicalDistribution({{-0.5, Eigen::Vector2d::Zero(), cov}, {1.5, Eigen::Vector2d::Zero(), cov}}),
                 std::invalid_argument);
    cov(1, 1) = -1.0;
    EXPECT_THROW(ClassicalDistribution({{1.0, Eigen::Vector2d::Zero(), cov}}), std::invalid_argument);
    const auto g = ClassicalDistribution::gaussian(0.5, -0.5, 0.2, 0.3);
    EXPECT_NEAR(g(0.5, -0.5), 1.0 / (2 * pi * std::sqrt(0.06)), 1e-14);
}

TEST(ClassicalSmoothing, VacuumWignerSmoothsToQ) {
    // the vacuum Wigner function is a Gaussian of variance 1/2; smoothing it gives the frame's Q
    const auto w = ClassicalDistribution::gaussian(0.0, 0.0, 0.5, 0.5);
    for (auto [l, t] : {std::pair{1.0, 0.0}, {0.5, 0.7}, {2.0, 2.0}}) {
        const SqueezedFrame f(l, t);
        const HusimiField q(f, DensityOperator::fock(0, 1));
        for (auto [x, p] : {std::pair{0.0, 0.0}, {0.8, -1.1}})
            EXPECT_NEAR(classical_smoothing(w, f, x, p), husimi_real(q, x, p).real(), 1e-14);
    }
}

TEST(FockFigure, GridAndMetadata) {
    const auto xs = linspace(-2, 2, 5), ps = linspace(-1, 1, 3);
    const auto a = fock_figure(2, SqueezedFrame(0.5, 0.3), xs, ps);
    EXPECT_EQ(a.values.rows(), 5);
    EXPECT_EQ(a.values.cols(), 3);
    EXPECT_EQ(a.metadata.at("formula"), "q_fock_general");
    EXPECT_DOUBLE_EQ(a.values(1, 2), q_fock_general(2, SqueezedFrame(0.5, 0.3), xs[1], ps[2]));
    EXPECT_EQ(fock_figure(2, SqueezedFrame(), xs, ps).metadata.at("formula"), "q_fock");
}

TEST(Nnls, SmallProblems) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2);
    const auto r = nnls(a, Eigen::Vector2d(1.0, -1.0));
    EXPECT_NEAR(r.x(0), 1.0, 2e-12);  // the default ridge shifts the solution by about 1e-12
    EXPECT_EQ(nnls(a, Eigen::Vector2d(1.0, -1.0), 0, 0.0).x(0), 1.0);
    EXPECT_EQ(r.x(1), 0.0);

    // KKT conditions on a random overdetermined problem
    std::mt19937_64 rng(31);
    std::normal_distribution<double> g;
    Eigen::MatrixXd m(30, 10);
    Eigen::VectorXd b(30);
    for (int i = 0; i < 30; ++i) {
        b(i) = g(rng);
        for (int j = 0; j < 10; ++j) m(i, j) = g(rng);
    }
    const auto s = nnls(m, b);
    EXPECT_FALSE(s.hit_cap);
    const Eigen::VectorXd grad = m.transpose() * (m * s.x - b);
    for (int j = 0; j < 10; ++j) {
        EXPECT_GE(s.x(j), 0.0);
        if (s.x(j) > 0) EXPECT_NEAR(grad(j), 0.0, 1e-9);
        else EXPECT_GE(grad(j), -1e-9);
    }
}

TEST(Complementarity, VacuumIsJointlyClassical) {
    ComplementaritySpec spec;
    spec.radius = 2.0;
    spec.spacing = 0.5;
    spec.samples = 21;
    const auto vac = DensityOperator::fock(0, 1);
    const auto rep = complementarity_report(vac, {SqueezedFrame(0.5, 0.0), SqueezedFrame(0.5, pi / 2)}, spec);
    EXPECT_EQ(rep.single_residuals.size(), 2u);
    EXPECT_LT(rep.joint_residual, 0.02);
    EXPECT_LT(rep.ratio, 1.5);
    EXPECT_THROW(complementarity_report(vac, {SqueezedFrame()}, spec), std::invalid_argument);
}
