// SPDX-License-Identifier: MIT
#include "jsde/increments.hpp"

#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "jsde/rng.hpp"

namespace {

using jsde::IncrementGrid;
using jsde::RandomSource;

TEST(Increments, BrownianScalingAndMoments) {
    const double dt = 1.0 / 1024.0;
    const std::size_t n = 1u << 20;
    const IncrementGrid grid = jsde::make_increment_grid(RandomSource{0, 0}, n, 1, dt, 0.0);
    double sum = 0.0;
    double sum2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sum += grid.dw(k);
        sum2 += grid.dw(k) * grid.dw(k);
    }
    const double mean = sum / static_cast<double>(n);
    const double var = sum2 / static_cast<double>(n) - mean * mean;
    EXPECT_NEAR(mean, 0.0, 4.0 * std::sqrt(dt / static_cast<double>(n)));
    EXPECT_NEAR(var / dt, 1.0, 0.01);
}

TEST(Increments, BrownianEqualsScaledNormalDraw) {
    const double dt = 0.125;
    const IncrementGrid grid = jsde::make_increment_grid(RandomSource{4, 9}, 64, 1, dt, 0.0);
    const jsde::CounterRng rng(RandomSource{4, 9});
    const double scale = std::sqrt(dt);
    for (std::size_t k = 0; k < 64; ++k) {
        EXPECT_EQ(grid.dw(k), scale * rng.normal(k, 0));
    }
}

TEST(Increments, PoissonCountsMatchRate) {
    const double dt = 1.0 / 64.0;
    const double lambda = 4.0;
    const std::size_t n = 1u << 18;
    const IncrementGrid grid =
        jsde::make_increment_grid(RandomSource{1, 0}, n, 1, dt, lambda);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        total += grid.dn(k);
    }
    const double horizon = dt * static_cast<double>(n);
    const double expected = lambda * horizon;
    EXPECT_NEAR(total, expected, 4.0 * std::sqrt(expected));
}

TEST(Increments, ZeroRateMakesZeroCountsWithoutRngUse) {
    const IncrementGrid grid = jsde::make_increment_grid(RandomSource{2, 0}, 128, 1, 0.5, 0.0);
    for (std::size_t k = 0; k < 128; ++k) {
        EXPECT_EQ(grid.dn(k), 0u);
    }
}

TEST(Increments, NegativeRateAndHugeMeanAreRejected) {
    EXPECT_THROW(jsde::make_increment_grid(RandomSource{0, 0}, 8, 1, 0.5, -1.0),
                 std::invalid_argument);
    EXPECT_THROW(jsde::make_increment_grid(RandomSource{0, 0}, 8, 1, 2.0, 1e7),
                 std::invalid_argument);
}

TEST(Increments, CoarsenBlockSumsExactly) {
    const IncrementGrid fine = jsde::make_increment_grid(RandomSource{3, 5}, 64, 1, 0.25, 2.0);
    const IncrementGrid coarse = jsde::coarsen(fine, 4);
    EXPECT_EQ(coarse.n_steps, 16u);
    EXPECT_DOUBLE_EQ(coarse.dt_fine, 1.0);
    for (std::size_t k = 0; k < 16; ++k) {
        double w = 0.0;
        std::uint64_t c = 0;
        for (std::size_t r = 0; r < 4; ++r) {
            w += fine.dw(4 * k + r);
            c += fine.dn(4 * k + r);
        }
        EXPECT_EQ(coarse.dw(k), w);
        EXPECT_EQ(coarse.dn(k), c);
    }
}

TEST(Increments, CoarsenRatioOneIsIdentity) {
    const IncrementGrid fine = jsde::make_increment_grid(RandomSource{3, 5}, 32, 1, 0.25, 2.0);
    const IncrementGrid same = jsde::coarsen(fine, 1);
    for (std::size_t k = 0; k < 32; ++k) {
        EXPECT_EQ(same.dw(k), fine.dw(k));
        EXPECT_EQ(same.dn(k), fine.dn(k));
    }
}

TEST(Increments, CoarsenRejectsNonDividingRatio) {
    const IncrementGrid fine = jsde::make_increment_grid(RandomSource{0, 0}, 30, 1, 0.1, 0.0);
    EXPECT_THROW(jsde::coarsen(fine, 4), std::invalid_argument);
    EXPECT_THROW(jsde::coarsen(fine, 0), std::invalid_argument);
}

TEST(Increments, CompensateSubtractsMeanRate) {
    const double dt = 0.25;
    const double lambda = 3.0;
    const IncrementGrid grid =
        jsde::make_increment_grid(RandomSource{8, 1}, 16, 1, dt, lambda);
    const std::vector<double> bar = jsde::compensate(grid.poisson, lambda, dt);
    ASSERT_EQ(bar.size(), 16u);
    for (std::size_t k = 0; k < 16; ++k) {
        EXPECT_DOUBLE_EQ(bar[k], static_cast<double>(grid.dn(k)) - lambda * dt);
    }
}

}  // namespace
