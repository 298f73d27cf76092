// SPDX-License-Identifier: MIT
#pragma once
//
// Monte Carlo experiment drivers: strong-convergence measurement against an
// exact or fine-grid reference, long-horizon mean-square stability sweeps,
// and one-step amplification validation against the closed-form factors.
//
// Every driver is a deterministic function of its configuration. Paths are
// tied to fixed random streams (stream id = path index), per-path results are
// staged in path-indexed storage, and reductions run in path index order, so
// the output bytes are independent of the thread count.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "jsde/problem.hpp"
#include "jsde/schemes.hpp"
#include "jsde/stability.hpp"

namespace jsde {

// What the strong error is measured against. ExactLinear uses the closed-form
// solution evaluated at the path's terminal (W_T, N_T); FineNumerical uses
// the same noise integrated on the fine grid, by the scheme under test unless
// reference_scheme overrides it.
enum class ReferenceKind { ExactLinear, FineNumerical };

struct ConvergenceConfig {
    std::size_t fine_exponent = 12;  // fine grid has 2^fine_exponent steps
    std::vector<std::size_t> ratios = {1, 2, 4, 8, 16};
    std::size_t paths = 2000;  // at least 100
    double horizon = 1.0;
    ReferenceKind reference = ReferenceKind::ExactLinear;
    std::optional<SchemeKind> reference_scheme;  // FineNumerical only
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

// One coarsening level. mc_stderr is the batch-means standard error of the
// RMSE (10 contiguous path batches). A row enters the order fit only when its
// RMSE is finite and positive and at most 1% of paths diverged; a row where
// every path diverged reports rmse = +inf.
struct ConvergenceRow {
    double dt = 0.0;
    double rmse = 0.0;
    double mc_stderr = 0.0;
    double diverged_frac = 0.0;
    bool in_fit = false;
};

// Least-squares fit of log rmse against log dt. residual is the RMS residual
// of the fit in log space.
struct OrderFit {
    double order = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;  // one per ratio, input order
    std::optional<OrderFit> fit;       // absent when fewer than 3 rows qualify
};

// Fits the observed order: OLS of ln(rmse) on ln(dt). Requires at least 3
// points, every dt positive and distinct-enough to regress on, and every
// rmse finite and positive; throws std::invalid_argument otherwise.
OrderFit fit_order(const std::vector<double>& dts, const std::vector<double>& rmses);

// Measures strong error at the horizon over coupled grids: each path draws
// one fine noise realization, every coarse run consumes block sums of it, and
// the error is |Y_coarse(T) - reference(T)|. Throws std::invalid_argument for
// inconsistent configuration (fewer than 100 paths, a ratio not dividing the
// fine grid, ExactLinear on a problem without linear coefficients, ratio 1
// under a same-scheme fine-numerical reference, reference_scheme without
// FineNumerical).
ConvergenceReport run_convergence(const JumpSdeProblem& problem, const SchemeSpec& scheme,
                                  const ConvergenceConfig& config);

struct StabilityConfig {
    double horizon = 2500.0;
    std::size_t paths = 2000;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    std::size_t max_records = 1001;  // series length cap; sampling stride rounds up
    double epsilon = 1e-3;           // classification threshold, per unit time
};

// The sampled mean-square series for one step size and its classification.
struct StabilitySeries {
    double dt = 0.0;
    std::vector<StabilityPoint> points;
    ClassificationResult result{Classification::Inconclusive, 0.0};
};

struct StabilityReport {
    std::vector<StabilitySeries> series;  // one per dt, input order
};

// Integrates `paths` independent paths to the horizon for each step size and
// records E|Y_n|^2 at every step, subsampled by the smallest stride that
// keeps the series within max_records (first and last steps are always
// recorded). Divergence is data: non-finite states propagate into the series
// and the classifier reports Unstable. A failed implicit stage likewise
// marks its path diverged rather than aborting the sweep. Throws
// std::invalid_argument when a dt yields fewer than 8 samples before
// subsampling, or for non-positive dts, horizon, paths, or epsilon.
StabilityReport run_stability_sweep(const JumpSdeProblem& problem, const SchemeSpec& scheme,
                                    const std::vector<double>& dts,
                                    const StabilityConfig& config);

struct AmplificationConfig {
    std::size_t samples = 1000000;  // at least 1000
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

// Comparison of the closed-form one-step mean-square factor against a Monte
// Carlo estimate of E|Y_1|^2 from Y_0 = 1. z is the normalized discrepancy
// (empirical - predicted) / std_error.
struct AmplificationResult {
    double dt = 0.0;
    double predicted = 0.0;
    double empirical = 0.0;
    double std_error = 0.0;
    double z = 0.0;
};

// Samples one step of the scheme on the linear equation from Y_0 = 1 and
// compares the sample mean of Y_1^2 with the closed-form factor. Supported
// schemes are the ones with an exact factor: explicit Euler, STM, CSTM, and
// the semi-tamed family under the all-linear split (v identically zero).
// Throws std::invalid_argument for other schemes, a split with a live tamed
// part, or fewer than 1000 samples.
AmplificationResult run_amplification_validation(const LinearJumpSde& lin,
                                                 const SchemeSpec& scheme, double dt,
                                                 const AmplificationConfig& config);

}  // namespace jsde
