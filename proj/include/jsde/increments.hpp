// SPDX-License-Identifier: MIT
#pragma once
//
// Brownian and Poisson increments on a fine uniform grid, with exact
// coarsening. A coarse grid built by summing blocks of fine increments shares
// the fine grid's noise realization, which is what makes strong-error
// measurements well defined: fine and coarse paths see the same randomness.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "jsde/rng.hpp"

namespace jsde {

// Per-path increments over n_steps uniform steps of size dt_fine.
//   brownian: row-major [n_steps x m], entry (n, j) ~ Normal(0, dt_fine)
//   poisson:  [n_steps], entry n ~ Poisson(lambda * dt_fine)
struct IncrementGrid {
    double dt_fine = 0.0;
    std::size_t n_steps = 0;
    std::size_t m = 1;
    double lambda = 0.0;
    std::vector<double> brownian;
    std::vector<std::uint64_t> poisson;

    double dw(std::size_t step, std::size_t dim = 0) const { return brownian[step * m + dim]; }
    std::uint64_t dn(std::size_t step) const { return poisson[step]; }
};

// Brownian increments: independent Normal(0, dt) entries, deterministic given
// the source. Throws std::invalid_argument for dt <= 0, n_steps == 0, m == 0.
std::vector<double> generate_brownian(const RandomSource& source, std::size_t n_steps,
                                      std::size_t m, double dt);

// Poisson counts: independent Poisson(lambda*dt) entries. lambda == 0 yields
// all zeros. Throws std::invalid_argument for lambda < 0, dt <= 0, or
// lambda*dt > 1e6 (sequential-search sampling is unreasonable there).
std::vector<std::uint64_t> generate_poisson(const RandomSource& source, std::size_t n_steps,
                                            double lambda, double dt);

// Compensated increments: counts[i] - lambda*dt, the martingale increments of
// N(t) - lambda*t.
std::vector<double> compensate(const std::vector<std::uint64_t>& counts, double lambda,
                               double dt);

// Convenience constructor filling both noise arrays from one source.
IncrementGrid make_increment_grid(const RandomSource& source, std::size_t n_steps,
                                  std::size_t m, double dt, double lambda);

// Exact block-sum coarsening by an integer ratio: the coarse grid has
// n_steps/ratio steps of size ratio*dt_fine, each increment the sum of its
// ratio fine increments (Brownian per dimension, Poisson counts exactly).
// Throws std::invalid_argument when ratio does not divide n_steps.
IncrementGrid coarsen(const IncrementGrid& grid, std::size_t ratio);

}  // namespace jsde
