// SPDX-License-Identifier: MIT
#include "jsde/stability.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "jsde/rng.hpp"

namespace {

using jsde::Classification;
using jsde::NonlinearStabilityInputs;
using jsde::StabilityPoint;

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(LinearL, HandWorkedValues) {
    // 2a + b^2 + lambda*c*(2+c).
    EXPECT_NEAR(jsde::linear_l(2.0, 2.0, -0.9, 9.0), -0.91, 1e-12);
    EXPECT_NEAR(jsde::linear_l(-7.0, 1.0, 1.0, 4.0), -1.0, 1e-12);
    EXPECT_NEAR(jsde::linear_l(-1.0, 2.0, -0.9, 9.0), -6.91, 1e-12);
    EXPECT_NEAR(jsde::linear_l(1.0, 1.0, 0.5, 1.0), 4.25, 1e-12);
}

TEST(CstmFactor, HandWorkedValueFullyImplicit) {
    // A = -3; numerator 1 + (b^2 + c^2 lambda) dt = 126 at dt 25; denominator
    // (1 + 75)^2.
    EXPECT_NEAR(jsde::cstm_amplification(-7.0, 1.0, 1.0, 4.0, 1.0, 25.0), 126.0 / 5776.0,
                1e-15);
}

TEST(CstmFactor, SingularDenominatorThrows) {
    // 1 - theta*dt*A = 1 - 1*0.5*2 = 0.
    EXPECT_THROW(jsde::cstm_amplification(2.0, 0.0, 0.0, 0.0, 1.0, 0.5), std::domain_error);
}

TEST(CstmFactor, AStableForThetaAtLeastHalf) {
    // With l < 0 and theta >= 1/2 the factor stays below 1 at arbitrarily
    // large steps.
    for (double theta : {0.5, 0.75, 1.0}) {
        for (double dt : {0.1, 1.0, 100.0, 1e6}) {
            EXPECT_LT(jsde::cstm_amplification(-7.0, 1.0, 1.0, 4.0, theta, dt), 1.0);
            EXPECT_LT(jsde::cstm_amplification(2.0, 2.0, -0.9, 9.0, theta, dt), 1.0);
        }
    }
}

TEST(CstmThreshold, ExplicitCaseHandWorkedValues) {
    EXPECT_NEAR(jsde::cstm_max_stable_dt(-7.0, 1.0, 1.0, 4.0, 0.0), 1.0 / 9.0, 1e-12);
    EXPECT_NEAR(jsde::cstm_max_stable_dt(2.0, 2.0, -0.9, 9.0, 0.0), 0.91 / 37.21, 1e-12);
}

TEST(CstmThreshold, InfiniteForAStableThetaAndThrowsWhenEquationUnstable) {
    EXPECT_EQ(jsde::cstm_max_stable_dt(-7.0, 1.0, 1.0, 4.0, 0.5), kInf);
    EXPECT_EQ(jsde::cstm_max_stable_dt(-7.0, 1.0, 1.0, 4.0, 1.0), kInf);
    EXPECT_THROW(jsde::cstm_max_stable_dt(1.0, 1.0, 0.5, 1.0, 0.0), std::domain_error);
}

TEST(CstmThreshold, FactorCrossesOneAtTheThreshold) {
    // Just below the bound the factor certifies, just above it does not.
    const double bound = jsde::cstm_max_stable_dt(-7.0, 1.0, 1.0, 4.0, 0.0);
    EXPECT_LT(jsde::cstm_amplification(-7.0, 1.0, 1.0, 4.0, 0.0, bound * 0.999), 1.0);
    EXPECT_GT(jsde::cstm_amplification(-7.0, 1.0, 1.0, 4.0, 0.0, bound * 1.001), 1.0);
}

TEST(StmFactor, ThetaZeroReducesToDeterministicGrowth) {
    // b = c = lambda = 0: G = (1 + a dt)^2.
    EXPECT_NEAR(jsde::stm_amplification(1.0, 0.0, 0.0, 0.0, 0.0, 0.5), 2.25, 1e-15);
}

TEST(StmFactor, ThetaZeroMatchesSemiTamedLinearFactor) {
    // At theta = 0 both schemes are explicit Euler on the linear equation, so
    // the closed forms must agree.
    const jsde::CounterRng rng(jsde::RandomSource{41, 0});
    for (int i = 0; i < 200; ++i) {
        const double a = 4.0 * rng.normal(i, 0);
        const double b = std::abs(rng.normal(i, 1));
        const double c = rng.normal(i, 2);
        const double lambda = std::abs(4.0 * rng.normal(i, 3));
        const double dt = std::exp(rng.normal(i, 4));
        const double stm = jsde::stm_amplification(a, b, c, lambda, 0.0, dt);
        const double semi = jsde::semi_tamed_linear_amplification(a, b, c, lambda, dt);
        EXPECT_NEAR(stm, semi, 1e-10 * std::max(1.0, std::abs(stm)));
    }
}

TEST(SemiTamedLinear, ThresholdHandWorkedValues) {
    EXPECT_NEAR(jsde::semi_tamed_linear_max_dt(-1.0, 2.0, -0.9, 9.0), 6.91 / 82.81, 1e-12);
    EXPECT_NEAR(jsde::semi_tamed_linear_max_dt(-7.0, 1.0, 1.0, 4.0), 1.0 / 9.0, 1e-12);
    EXPECT_THROW(jsde::semi_tamed_linear_max_dt(1.0, 1.0, 0.5, 1.0), std::domain_error);
}

TEST(SemiTamedLinear, FactorCrossesOneAtTheThreshold) {
    const double bound = jsde::semi_tamed_linear_max_dt(-1.0, 2.0, -0.9, 9.0);
    EXPECT_LT(jsde::semi_tamed_linear_amplification(-1.0, 2.0, -0.9, 9.0, bound * 0.999),
              1.0);
    EXPECT_GT(jsde::semi_tamed_linear_amplification(-1.0, 2.0, -0.9, 9.0, bound * 1.001),
              1.0);
}

TEST(TamedLinear, CertifiedBoundHandWorkedValue) {
    // a < 0 keeps a(1+lambda c dt) <= 0 on the certified range: case 1 with
    // bound (2a-l)/(a^2+lambda^2 c^2) = 4.91/66.61.
    const jsde::TamedCertification cert = jsde::tamed_linear_max_dt(-1.0, 2.0, -0.9, 9.0);
    EXPECT_EQ(cert.case_tag, 1);
    EXPECT_NEAR(cert.max_dt, 4.91 / 66.61, 1e-12);
}

TEST(TamedLinear, UnstableEquationThrows) {
    // l = 4.25 > 0: no stable step exists to certify.
    EXPECT_THROW(jsde::tamed_linear_max_dt(1.0, 1.0, 0.5, 1.0), std::domain_error);
}

TEST(TamedLinear, NoCaseCertifiesDespiteStableEquation) {
    // a = 0.1, b = 0, c = -0.5, lambda = 2: l = -1.3 < 0, but case 1 needs
    // a <= 0 and case 2's sign condition a(1 + lambda*c*dt) > 0 fails at its
    // candidate bound 1.3/0.81.
    const jsde::TamedCertification cert = jsde::tamed_linear_max_dt(0.1, 0.0, -0.5, 2.0);
    EXPECT_EQ(cert.case_tag, 0);
    EXPECT_EQ(cert.max_dt, 0.0);
}

TEST(NonlinearRates, AlphaHandWorkedValue) {
    // 2 mu + sigma + lambda sqrt(gamma)(sqrt(gamma)+2) = -10 + 1 + 3.
    EXPECT_NEAR(jsde::nonlinear_alpha(-5.0, 1.0, 1.0, 1.0), -6.0, 1e-12);
}

TEST(NonlinearRates, BackwardEulerRateHandWorkedValue) {
    // (1/dt) ln[(1 + 0.4 + 0.01)/2] at dt 0.1.
    EXPECT_NEAR(jsde::backward_euler_rate_beta1(-5.0, 1.0, 1.0, 1.0, 0.1),
                10.0 * std::log(1.41 / 2.0), 1e-12);
}

TEST(NonlinearRates, BackwardEulerRateDomainGuards) {
    // dt bound -alpha/(lambda^2 gamma) = 6 for this parameter set.
    EXPECT_THROW(jsde::backward_euler_rate_beta1(-5.0, 1.0, 1.0, 1.0, 7.0),
                 std::domain_error);
    // alpha > 0: no decay statement available.
    EXPECT_THROW(jsde::backward_euler_rate_beta1(3.0, 1.0, 1.0, 1.0, 0.1),
                 std::domain_error);
}

TEST(NonlinearRates, CompensatedBackwardEulerRateHandWorkedValue) {
    // ln[(1 + 2)/(1 + 8)] at dt 1.
    EXPECT_NEAR(jsde::compensated_backward_euler_rate_beta2(-5.0, 1.0, 1.0, 1.0, 1.0),
                std::log(1.0 / 3.0), 1e-12);
}

TEST(NonlinearRates, CompensatedBackwardEulerRateNegativeForAllSteps) {
    for (double dt : {1e-3, 1.0, 1e3}) {
        EXPECT_LT(jsde::compensated_backward_euler_rate_beta2(-5.0, 1.0, 1.0, 1.0, dt),
                  0.0);
    }
    EXPECT_THROW(jsde::compensated_backward_euler_rate_beta2(3.0, 1.0, 1.0, 1.0, 1.0),
                 std::domain_error);
}

TEST(NonlinearRates, SemiTamedBoundHandWorkedValue) {
    NonlinearStabilityInputs in;
    in.rho = 4.0;
    in.theta_g = 1.0;
    in.C = 1.0;
    in.lambda = 1.0;
    in.K = 4.0;
    in.beta = 1.0;
    in.beta_bar = 1.0;
    EXPECT_NEAR(jsde::semi_tamed_nonlinear_max_dt(in), 0.1, 1e-12);
}

TEST(NonlinearRates, SemiTamedBoundRejectsFailedHypotheses) {
    NonlinearStabilityInputs in;
    in.rho = 0.0;  // alpha1 = theta_g^2 + lambda C (2 + C) > 0
    in.theta_g = 1.0;
    in.C = 1.0;
    in.lambda = 1.0;
    in.K = 1.0;
    in.beta = 1.0;
    in.beta_bar = 1.0;
    EXPECT_THROW(jsde::semi_tamed_nonlinear_max_dt(in), std::domain_error);
}

TEST(NonlinearRates, TamedBoundHandWorkedValue) {
    NonlinearStabilityInputs in;
    in.K = 1.0;
    in.theta_g = 1.0;
    in.C = 0.5;
    in.lambda = 1.0;
    in.mu = 2.0;
    in.beta = 2.0;
    in.beta_bar = 1.0;
    EXPECT_NEAR(jsde::tamed_nonlinear_max_dt(in), 1.0 / 3.0, 1e-12);
}

TEST(Classifier, CleanDecayIsStableWithFittedRate) {
    std::vector<StabilityPoint> series;
    for (int i = 0; i < 20; ++i) {
        const double t = 0.5 * i;
        series.push_back({t, std::exp(-3.0 * t)});
    }
    const auto res = jsde::classify_mean_square(series);
    EXPECT_EQ(res.label, Classification::Stable);
    EXPECT_NEAR(res.rate, -3.0, 1e-9);
}

TEST(Classifier, CleanGrowthIsUnstable) {
    std::vector<StabilityPoint> series;
    for (int i = 0; i < 20; ++i) {
        const double t = 0.5 * i;
        series.push_back({t, std::exp(2.0 * t)});
    }
    const auto res = jsde::classify_mean_square(series);
    EXPECT_EQ(res.label, Classification::Unstable);
    EXPECT_NEAR(res.rate, 2.0, 1e-9);
}

TEST(Classifier, FlatSeriesIsInconclusive) {
    std::vector<StabilityPoint> series;
    for (int i = 0; i < 16; ++i) {
        series.push_back({static_cast<double>(i), 1.0});
    }
    const auto res = jsde::classify_mean_square(series);
    EXPECT_EQ(res.label, Classification::Inconclusive);
    EXPECT_NEAR(res.rate, 0.0, 1e-12);
}

TEST(Classifier, NonFiniteValueIsUnstable) {
    std::vector<StabilityPoint> series;
    for (int i = 0; i < 16; ++i) {
        series.push_back({static_cast<double>(i), 1.0});
    }
    series[10].mean_square = kInf;
    auto res = jsde::classify_mean_square(series);
    EXPECT_EQ(res.label, Classification::Unstable);
    EXPECT_EQ(res.rate, kInf);
    series[10].mean_square = std::nan("");
    res = jsde::classify_mean_square(series);
    EXPECT_EQ(res.label, Classification::Unstable);
}

TEST(Classifier, UnderflowToZeroIsDecisiveDecay) {
    // Decay that hits the floating-point floor: classification comes from the
    // positive prefix and is Stable outright.
    std::vector<StabilityPoint> series;
    for (int i = 0; i < 12; ++i) {
        const double t = static_cast<double>(i);
        series.push_back({t, std::exp(-5.0 * t)});
    }
    for (int i = 12; i < 20; ++i) {
        series.push_back({static_cast<double>(i), 0.0});
    }
    const auto res = jsde::classify_mean_square(series);
    EXPECT_EQ(res.label, Classification::Stable);
    EXPECT_NEAR(res.rate, -5.0, 1e-9);
}

TEST(Classifier, EarlyZeroIsStableWithInfiniteRate) {
    std::vector<StabilityPoint> series;
    series.push_back({0.0, 1.0});
    for (int i = 1; i < 16; ++i) {
        series.push_back({static_cast<double>(i), 0.0});
    }
    const auto res = jsde::classify_mean_square(series);
    EXPECT_EQ(res.label, Classification::Stable);
    EXPECT_EQ(res.rate, -kInf);
}

TEST(Classifier, ShortSeriesRejected) {
    std::vector<StabilityPoint> series(7, StabilityPoint{0.0, 1.0});
    EXPECT_THROW(jsde::classify_mean_square(series), std::invalid_argument);
}

}  // namespace
