#include "husimi/error_analysis.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace husimi;

TEST(BesselI0, MatchesStandardLibrary) {
    EXPECT_EQ(bessel_i0(0.0), 1.0);
    for (double x : {0.1, 1.0, 5.0, 10.0, 14.999, 15.0, 15.001, 20.0, 40.0, 300.0})
        EXPECT_NEAR(bessel_i0(x) / std::cyl_bessel_i(0.0, x), 1.0, 1e-13) << "x=" << x;
    EXPECT_THROW(bessel_i0(-1.0), std::invalid_argument);
}

TEST(DeltaQ, Examples) {
    EXPECT_EQ(delta_q(0.0, 0.5, {cplx(1, 1), cplx(2, 0)}), 0.0);
    EXPECT_DOUBLE_EQ(delta_q(1e-3, 0.7, {0.0, 0.0}), 1e-3);
    // only the moduli of the displacements enter
    EXPECT_DOUBLE_EQ(delta_q(1.0, 2.0, {cplx(0, 1), cplx(0.5, 0)}), delta_q(1.0, 2.0, {cplx(1, 0), cplx(0, -0.5)}));
    EXPECT_NEAR(delta_q(1.0, 0.5, {cplx(0.5, 0), 0.0}), std::sqrt(std::cyl_bessel_i(0.0, 2.0)), 1e-14);
    EXPECT_THROW(delta_q(1.0, 0.0, {}), std::invalid_argument);
}

TEST(DerivativeTable, TaylorSumReachesContinuedField) {
    std::mt19937_64 rng(21);
    const SqueezedFrame f(0.6, 0.8);
    const HusimiField q{f, DensityOperator(oracle::random_density(5, rng), f)};
    const auto t = derivative_table(q, 0.3, -0.2, 40);
    for (auto d : {DisplacementPair{0.0, 0.0}, {cplx(0.4, 0.3), cplx(-0.2, 0.5)}, {cplx(0, 1), cplx(0, -1)}}) {
        const cplx exact = husimi_continued(q, CPhasePoint(0.3 + d.eta, -0.2 + d.zeta));
        EXPECT_LT(std::abs(taylor_continuation(t, d).value - exact), 1e-12);
    }
    // first derivatives against central differences
    const double h = 1e-4;
    const double dqdx = (husimi_real(q, 0.3 + h, -0.2).real() - husimi_real(q, 0.3 - h, -0.2).real()) / (2 * h);
    const double dqdp = (husimi_real(q, 0.3, -0.2 + h).real() - husimi_real(q, 0.3, -0.2 - h).real()) / (2 * h);
    EXPECT_NEAR(t.derivative(1, 0).real(), dqdx, 1e-8);
    EXPECT_NEAR(t.derivative(0, 1).real(), dqdp, 1e-8);
    EXPECT_THROW(derivative_table(q, 0, 0, -1), std::invalid_argument);
}

TEST(DerivativeTable, RemainderGuard) {
    const HusimiField q(SqueezedFrame(), DensityOperator::fock(2, 3));
    const auto t = derivative_table(q, 0.0, 0.0, 4);
    EXPECT_THROW(taylor_continuation(t, {cplx(0, 3), cplx(0, 3)}, 1e-6), TruncationError);
    EXPECT_NO_THROW(taylor_continuation(derivative_table(q, 0.0, 0.0, 60), {cplx(0, 1.5), cplx(0, 1.5)}, 1e-6));
}

TEST(PortableNormal, DeterministicAndStandard) {
    EXPECT_EQ(PortableNormal::splitmix64(0), 0xE220A8397B1DCDAFULL);
    PortableNormal a(7), b(7), c(8);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const double x = a(), y = b();
        EXPECT_EQ(x, y);
        differs |= x != c();
    }
    EXPECT_TRUE(differs);

    auto s = PortableNormal::substream(5, 3);
    double sum = 0, sq = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double g = s();
        sum += g;
        sq += g * g;
    }
    EXPECT_NEAR(sum / n, 0.0, 5.0 / std::sqrt(double(n)));
    EXPECT_NEAR(sq / n, 1.0, 5.0 * std::sqrt(2.0 / n));
    EXPECT_NE(PortableNormal::substream(5, 3)(), PortableNormal::substream(5, 4)());
}

TEST(MonteCarlo, NoNoiseNoError) {
    const HusimiField q(SqueezedFrame(0.5, 0.0), DensityOperator::fock(0, 1));
    const std::vector<DisplacementPair> d{{0.5, 0.0}, {0.0, cplx(0, 1)}};
    MonteCarloSpec spec;
    spec.trials = 100;
    for (const auto& r : monte_carlo_error_growth(q, 0, 0, NoiseSpec(0.0), d, spec)) {
        EXPECT_EQ(r.rms, 0.0);
        EXPECT_EQ(r.predicted, 0.0);
    }
    spec.trials = 50;
    EXPECT_THROW(monte_carlo_error_growth(q, 0, 0, NoiseSpec(0.0), d, spec), std::invalid_argument);
    EXPECT_THROW(NoiseSpec(-1.0), std::invalid_argument);
}

TEST(MonteCarlo, IndependentModelTracksPrediction) {
    const HusimiField q(SqueezedFrame(0.5, 0.0), DensityOperator::fock(0, 1));
    const std::vector<DisplacementPair> d{{0.5, 0.0}, {cplx(1, 0), cplx(0, 1)}};
    MonteCarloSpec spec;
    spec.trials = 4000;
    const auto a = monte_carlo_error_growth(q, 0, 0, NoiseSpec(1e-6), d, spec);
    const auto b = monte_carlo_error_growth(q, 0, 0, NoiseSpec(1e-6), d, spec);
    for (std::size_t k = 0; k < d.size(); ++k) {
        EXPECT_EQ(a[k].rms, b[k].rms);
        // sampling error of an RMS estimate is about 1/sqrt(2T)
        EXPECT_NEAR(a[k].rms / a[k].predicted, 1.0, 5.0 / std::sqrt(2.0 * spec.trials));
    }
}

TEST(MonteCarlo, GridModelSeesOnlyFiniteDifferenceErrorWithoutNoise) {
    const HusimiField q(SqueezedFrame(), DensityOperator::fock(0, 1));
    MonteCarloSpec spec;
    spec.trials = 100;
    const auto r = monte_carlo_error_growth(q, 0.2, 0.1, NoiseSpec(0.0, NoiseModel::grid_sampled), {{0.3, 0.0}}, spec);
    EXPECT_LT(r[0].rms, 1e-6);
}
