// SPDX-License-Identifier: MIT

#include "jsde/increments.hpp"

#include <cmath>
#include <stdexcept>

namespace jsde {

namespace {

constexpr double kMaxPoissonMean = 1.0e6;

void check_grid_args(std::size_t n_steps, std::size_t m, double dt) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("increment grid requires dt > 0");
    }
    if (n_steps == 0) {
        throw std::invalid_argument("increment grid requires n_steps >= 1");
    }
    if (m == 0 || m >= 0x10000) {
        throw std::invalid_argument("Brownian dimension must be in [1, 65535]");
    }
}

}  // namespace

std::vector<double> generate_brownian(const RandomSource& source, std::size_t n_steps,
                                      std::size_t m, double dt) {
    check_grid_args(n_steps, m, dt);
    const CounterRng rng(source);
    const double scale = std::sqrt(dt);
    std::vector<double> out(n_steps * m);
    for (std::size_t n = 0; n < n_steps; ++n) {
        for (std::size_t j = 0; j < m; ++j) {
            out[n * m + j] = scale * rng.normal(n, static_cast<std::uint32_t>(j));
        }
    }
    return out;
}

std::vector<std::uint64_t> generate_poisson(const RandomSource& source, std::size_t n_steps,
                                            double lambda, double dt) {
    check_grid_args(n_steps, 1, dt);
    if (lambda < 0.0) {
        throw std::invalid_argument("Poisson intensity must be >= 0");
    }
    const double mean = lambda * dt;
    if (mean > kMaxPoissonMean) {
        throw std::invalid_argument("lambda*dt > 1e6: refusing sequential-search sampling");
    }
    std::vector<std::uint64_t> out(n_steps, 0);
    if (lambda == 0.0) {
        return out;
    }
    const CounterRng rng(source);
    for (std::size_t n = 0; n < n_steps; ++n) {
        out[n] = rng.poisson(n, mean);
    }
    return out;
}

std::vector<double> compensate(const std::vector<std::uint64_t>& counts, double lambda,
                               double dt) {
    const double shift = lambda * dt;
    std::vector<double> out(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        out[i] = static_cast<double>(counts[i]) - shift;
    }
    return out;
}

IncrementGrid make_increment_grid(const RandomSource& source, std::size_t n_steps,
                                  std::size_t m, double dt, double lambda) {
    IncrementGrid grid;
    grid.dt_fine = dt;
    grid.n_steps = n_steps;
    grid.m = m;
    grid.lambda = lambda;
    grid.brownian = generate_brownian(source, n_steps, m, dt);
    grid.poisson = generate_poisson(source, n_steps, lambda, dt);
    return grid;
}

IncrementGrid coarsen(const IncrementGrid& grid, std::size_t ratio) {
    if (ratio == 0 || grid.n_steps % ratio != 0) {
        throw std::invalid_argument("coarsening ratio must divide n_steps");
    }
    if (ratio == 1) {
        return grid;
    }
    IncrementGrid out;
    const std::size_t nc = grid.n_steps / ratio;
    out.dt_fine = grid.dt_fine * static_cast<double>(ratio);
    out.n_steps = nc;
    out.m = grid.m;
    out.lambda = grid.lambda;
    out.brownian.assign(nc * grid.m, 0.0);
    out.poisson.assign(nc, 0);
    for (std::size_t k = 0; k < nc; ++k) {
        for (std::size_t r = 0; r < ratio; ++r) {
            const std::size_t fine = k * ratio + r;
            for (std::size_t j = 0; j < grid.m; ++j) {
                out.brownian[k * grid.m + j] += grid.brownian[fine * grid.m + j];
            }
            out.poisson[k] += grid.poisson[fine];
        }
    }
    return out;
}

}  // namespace jsde
