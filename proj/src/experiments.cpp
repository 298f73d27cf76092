// SPDX-License-Identifier: MIT

#include "jsde/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

#include "jsde/increments.hpp"
#include "jsde/linear_kernel.hpp"
#include "jsde/rng.hpp"

namespace jsde {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Runs body over [0, n_items) split into at most `threads` contiguous chunks.
// The body must confine its writes to per-item storage; reductions happen
// after this returns, in item order. The first exception thrown by any chunk
// is rethrown after all threads join.
void run_partitioned(std::size_t n_items, std::size_t threads,
                     const std::function<void(std::size_t, std::size_t)>& body) {
    std::size_t t = threads == 0 ? 1 : threads;
    if (n_items == 0) {
        return;
    }
    t = std::min(t, n_items);
    if (t <= 1) {
        body(0, n_items);
        return;
    }
    std::mutex mu;
    std::exception_ptr first;
    auto guarded = [&](std::size_t begin, std::size_t end) {
        try {
            body(begin, end);
        } catch (...) {
            const std::lock_guard<std::mutex> lock(mu);
            if (!first) {
                first = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (std::size_t i = 0; i < t; ++i) {
        pool.emplace_back(guarded, i * n_items / t, (i + 1) * n_items / t);
    }
    for (auto& th : pool) {
        th.join();
    }
    if (first) {
        std::rethrow_exception(first);
    }
}

}  // namespace

OrderFit fit_order(const std::vector<double>& dts, const std::vector<double>& rmses) {
    if (dts.size() != rmses.size()) {
        throw std::invalid_argument("fit_order: dts and rmses must have equal length");
    }
    const std::size_t n = dts.size();
    if (n < 3) {
        throw std::invalid_argument("fit_order: need at least 3 points");
    }
    std::vector<double> xs(n);
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(dts[i] > 0.0) || !std::isfinite(dts[i])) {
            throw std::invalid_argument("fit_order: step sizes must be positive and finite");
        }
        if (!(rmses[i] > 0.0) || !std::isfinite(rmses[i])) {
            throw std::invalid_argument("fit_order: errors must be positive and finite");
        }
        xs[i] = std::log(dts[i]);
        ys[i] = std::log(rmses[i]);
    }
    double xbar = 0.0;
    double ybar = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        xbar += xs[i];
        ybar += ys[i];
    }
    xbar /= static_cast<double>(n);
    ybar /= static_cast<double>(n);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - xbar) * (xs[i] - xbar);
        sxy += (xs[i] - xbar) * (ys[i] - ybar);
    }
    if (!(sxx > 0.0)) {
        throw std::invalid_argument("fit_order: step sizes must not all coincide");
    }
    OrderFit fit;
    fit.order = sxy / sxx;
    fit.intercept = ybar - fit.order * xbar;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (fit.intercept + fit.order * xs[i]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / static_cast<double>(n));
    return fit;
}

ConvergenceReport run_convergence(const JumpSdeProblem& problem, const SchemeSpec& scheme,
                                  const ConvergenceConfig& cfg) {
    validate_scheme(scheme);
    if (cfg.paths < 100) {
        throw std::invalid_argument("convergence needs at least 100 paths");
    }
    if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) {
        throw std::invalid_argument("horizon must be positive and finite");
    }
    if (cfg.fine_exponent > 26) {
        throw std::invalid_argument("fine_exponent above 26 is unreasonably large");
    }
    if (cfg.ratios.empty()) {
        throw std::invalid_argument("at least one coarsening ratio is required");
    }
    const std::size_t n_fine = std::size_t{1} << cfg.fine_exponent;
    const bool same_scheme_ref =
        cfg.reference == ReferenceKind::FineNumerical &&
        (!cfg.reference_scheme || *cfg.reference_scheme == scheme.kind);
    for (const std::size_t r : cfg.ratios) {
        if (r == 0 || n_fine % r != 0) {
            throw std::invalid_argument("every ratio must divide the fine step count");
        }
        if (r == 1 && same_scheme_ref) {
            throw std::invalid_argument(
                "ratio 1 reproduces a same-scheme fine reference exactly; use ratios >= 2 "
                "or an exact/cross-scheme reference");
        }
    }
    if (cfg.reference == ReferenceKind::ExactLinear) {
        if (!problem.linear) {
            throw std::invalid_argument("exact reference requires the linear test equation");
        }
        if (cfg.reference_scheme) {
            throw std::invalid_argument("reference_scheme requires the fine-numerical reference");
        }
    }
    SchemeSpec ref_spec = scheme;
    if (cfg.reference_scheme) {
        ref_spec.kind = *cfg.reference_scheme;
        validate_scheme(ref_spec);
    }

    const double dt_fine = cfg.horizon / static_cast<double>(n_fine);
    const std::size_t n_ratios = cfg.ratios.size();
    std::vector<double> err2(n_ratios * cfg.paths, 0.0);
    std::vector<unsigned char> dead(n_ratios * cfg.paths, 0);

    run_partitioned(cfg.paths, cfg.threads, [&](std::size_t p0, std::size_t p1) {
        for (std::size_t p = p0; p < p1; ++p) {
            const IncrementGrid grid = make_increment_grid(RandomSource{cfg.seed, p}, n_fine,
                                                           1, dt_fine, problem.lambda);
            double ref = 0.0;
            bool ref_ok = true;
            if (cfg.reference == ReferenceKind::ExactLinear) {
                double w_t = 0.0;
                std::uint64_t n_t = 0;
                for (std::size_t k = 0; k < n_fine; ++k) {
                    w_t += grid.dw(k);
                    n_t += grid.dn(k);
                }
                ref = exact_linear_solution(*problem.linear, cfg.horizon, w_t, n_t);
            } else {
                const Endpoint ep = integrate_endpoint(problem, ref_spec, grid, 1);
                ref_ok = !ep.diverged;
                ref = ep.value;
            }
            for (std::size_t ri = 0; ri < n_ratios; ++ri) {
                const std::size_t idx = ri * cfg.paths + p;
                if (!ref_ok) {
                    dead[idx] = 1;
                    continue;
                }
                const Endpoint ep = integrate_endpoint(problem, scheme, grid, cfg.ratios[ri]);
                if (ep.diverged) {
                    dead[idx] = 1;
                    continue;
                }
                const double err = ep.value - ref;
                err2[idx] = err * err;
            }
        }
    });

    constexpr std::size_t kBatches = 10;
    ConvergenceReport report;
    report.rows.reserve(n_ratios);
    std::vector<double> fit_dts;
    std::vector<double> fit_rmses;
    for (std::size_t ri = 0; ri < n_ratios; ++ri) {
        double total = 0.0;
        std::size_t alive = 0;
        std::size_t diverged = 0;
        std::array<double, kBatches> batch_sum{};
        std::array<std::size_t, kBatches> batch_cnt{};
        for (std::size_t p = 0; p < cfg.paths; ++p) {
            const std::size_t idx = ri * cfg.paths + p;
            if (dead[idx]) {
                ++diverged;
                continue;
            }
            const std::size_t b = p * kBatches / cfg.paths;
            total += err2[idx];
            batch_sum[b] += err2[idx];
            ++batch_cnt[b];
            ++alive;
        }
        ConvergenceRow row;
        row.dt = dt_fine * static_cast<double>(cfg.ratios[ri]);
        row.diverged_frac = static_cast<double>(diverged) / static_cast<double>(cfg.paths);
        if (alive == 0) {
            row.rmse = kInf;
            row.mc_stderr = kInf;
        } else {
            row.rmse = std::sqrt(total / static_cast<double>(alive));
            std::vector<double> batch_rmse;
            batch_rmse.reserve(kBatches);
            for (std::size_t b = 0; b < kBatches; ++b) {
                if (batch_cnt[b] > 0) {
                    batch_rmse.push_back(
                        std::sqrt(batch_sum[b] / static_cast<double>(batch_cnt[b])));
                }
            }
            if (batch_rmse.size() < 2) {
                row.mc_stderr = kInf;
            } else {
                const double k = static_cast<double>(batch_rmse.size());
                double mean = 0.0;
                for (const double v : batch_rmse) {
                    mean += v;
                }
                mean /= k;
                double ss = 0.0;
                for (const double v : batch_rmse) {
                    ss += (v - mean) * (v - mean);
                }
                row.mc_stderr = std::sqrt(ss / (k - 1.0) / k);
            }
        }
        row.in_fit = std::isfinite(row.rmse) && row.rmse > 0.0 && row.diverged_frac <= 0.01;
        if (row.in_fit) {
            fit_dts.push_back(row.dt);
            fit_rmses.push_back(row.rmse);
        }
        report.rows.push_back(row);
    }
    if (fit_dts.size() >= 3) {
        report.fit = fit_order(fit_dts, fit_rmses);
    }
    return report;
}

StabilityReport run_stability_sweep(const JumpSdeProblem& problem, const SchemeSpec& scheme,
                                    const std::vector<double>& dts,
                                    const StabilityConfig& cfg) {
    validate_scheme(scheme);
    if (cfg.paths == 0) {
        throw std::invalid_argument("stability sweep needs at least one path");
    }
    if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) {
        throw std::invalid_argument("horizon must be positive and finite");
    }
    if (!(cfg.epsilon > 0.0)) {
        throw std::invalid_argument("epsilon must be positive");
    }
    if (cfg.max_records < 8) {
        throw std::invalid_argument("max_records below 8 cannot satisfy the classifier");
    }
    if (dts.empty()) {
        throw std::invalid_argument("at least one step size is required");
    }
    const bool kernel_eligible = linear_kernel_supported(problem, scheme);

    StabilityReport report;
    report.series.reserve(dts.size());
    for (const double dt : dts) {
        if (!(dt > 0.0) || !std::isfinite(dt)) {
            throw std::invalid_argument("step sizes must be positive and finite");
        }
        const std::size_t n_steps =
            static_cast<std::size_t>(std::llround(cfg.horizon / dt));
        if (n_steps < 7) {
            throw std::invalid_argument(
                "horizon/dt yields fewer than 8 mean-square samples");
        }
        const double mean_events = problem.lambda * dt;
        if (mean_events > 1.0e6) {
            throw std::invalid_argument("lambda*dt > 1e6: refusing sequential-search sampling");
        }

        std::size_t stride = 1;
        if (n_steps + 1 > cfg.max_records) {
            stride = (n_steps + cfg.max_records - 2) / (cfg.max_records - 1);
        }
        std::vector<std::size_t> rec_steps;
        rec_steps.push_back(0);
        for (std::size_t k = stride; k < n_steps; k += stride) {
            rec_steps.push_back(k);
        }
        rec_steps.push_back(n_steps);
        const std::size_t n_rec = rec_steps.size();

        bool use_kernel = kernel_eligible;
        LinearKernelParams kp;
        if (use_kernel) {
            try {
                kp = make_linear_kernel_params(*problem.linear, scheme.kind, scheme.theta, dt);
            } catch (const SolverError&) {
                use_kernel = false;  // generic path marks every path diverged
            }
        }
        const double sqrt_dt = std::sqrt(dt);
        std::vector<double> slab(n_rec * cfg.paths);

        run_partitioned(cfg.paths, cfg.threads, [&](std::size_t p0, std::size_t p1) {
            if (use_kernel) {
                const std::size_t width = p1 - p0;
                std::vector<double> y(width, problem.x0);
                std::vector<double> dw(width);
                std::vector<double> dn(width);
                for (std::size_t i = 0; i < width; ++i) {
                    slab[p0 + i] = y[i] * y[i];
                }
                std::size_t next_rec = 1;
                for (std::size_t k = 0; k < n_steps; ++k) {
                    for (std::size_t i = 0; i < width; ++i) {
                        const CounterRng rng(RandomSource{cfg.seed, p0 + i});
                        dw[i] = sqrt_dt * rng.normal(k, 0);
                        dn[i] = problem.lambda == 0.0
                                    ? 0.0
                                    : static_cast<double>(rng.poisson(k, mean_events));
                    }
                    linear_scheme_step(kp, y.data(), dw.data(), dn.data(), y.data(), width);
                    if (next_rec < n_rec && rec_steps[next_rec] == k + 1) {
                        for (std::size_t i = 0; i < width; ++i) {
                            slab[next_rec * cfg.paths + p0 + i] = y[i] * y[i];
                        }
                        ++next_rec;
                    }
                }
            } else {
                for (std::size_t p = p0; p < p1; ++p) {
                    const CounterRng rng(RandomSource{cfg.seed, p});
                    double y = problem.x0;
                    slab[p] = y * y;
                    std::size_t next_rec = 1;
                    for (std::size_t k = 0; k < n_steps; ++k) {
                        const double dw = sqrt_dt * rng.normal(k, 0);
                        const double count =
                            problem.lambda == 0.0
                                ? 0.0
                                : static_cast<double>(rng.poisson(k, mean_events));
                        try {
                            y = scheme_step(problem, scheme, y, dw, count, dt);
                        } catch (const SolverError&) {
                            y = kInf;
                        }
                        if (next_rec < n_rec && rec_steps[next_rec] == k + 1) {
                            slab[next_rec * cfg.paths + p] = y * y;
                            ++next_rec;
                        }
                    }
                }
            }
        });

        StabilitySeries series;
        series.dt = dt;
        series.points.reserve(n_rec);
        for (std::size_t r = 0; r < n_rec; ++r) {
            double sum = 0.0;
            for (std::size_t p = 0; p < cfg.paths; ++p) {
                sum += slab[r * cfg.paths + p];
            }
            series.points.push_back(StabilityPoint{
                static_cast<double>(rec_steps[r]) * dt, sum / static_cast<double>(cfg.paths)});
        }
        series.result = classify_mean_square(series.points, cfg.epsilon);
        report.series.push_back(std::move(series));
    }
    return report;
}

AmplificationResult run_amplification_validation(const LinearJumpSde& lin,
                                                 const SchemeSpec& scheme, double dt,
                                                 const AmplificationConfig& cfg) {
    if (cfg.samples < 1000) {
        throw std::invalid_argument("amplification validation needs at least 1000 samples");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("dt must be positive and finite");
    }
    double theta = scheme.theta;
    double predicted = 0.0;
    switch (scheme.kind) {
        case SchemeKind::ExplicitEuler:
            theta = 0.0;
            predicted = stm_amplification(lin.a, lin.b, lin.c, lin.lambda, 0.0, dt);
            break;
        case SchemeKind::Stm:
            if (!(theta >= 0.0 && theta <= 1.0)) {
                throw std::invalid_argument("theta must lie in [0, 1]");
            }
            predicted = stm_amplification(lin.a, lin.b, lin.c, lin.lambda, theta, dt);
            break;
        case SchemeKind::Cstm:
            if (!(theta >= 0.0 && theta <= 1.0)) {
                throw std::invalid_argument("theta must lie in [0, 1]");
            }
            predicted = cstm_amplification(lin.a, lin.b, lin.c, lin.lambda, theta, dt);
            break;
        case SchemeKind::SemiTamed:
        case SchemeKind::CompensatedSemiTamed:
            if (scheme.split && !scheme.split->v_zero) {
                throw std::invalid_argument(
                    "the closed-form factor requires the all-linear split (v == 0)");
            }
            predicted = semi_tamed_linear_amplification(lin.a, lin.b, lin.c, lin.lambda, dt);
            break;
        default:
            throw std::invalid_argument("no closed-form amplification factor for " +
                                        scheme_name(scheme.kind));
    }
    const double mean_events = lin.lambda * dt;
    if (mean_events > 1.0e6) {
        throw std::invalid_argument("lambda*dt > 1e6: refusing sequential-search sampling");
    }
    const LinearKernelParams kp = make_linear_kernel_params(lin, scheme.kind, theta, dt);
    const double sqrt_dt = std::sqrt(dt);

    std::vector<double> y2(cfg.samples);
    run_partitioned(cfg.samples, cfg.threads, [&](std::size_t s0, std::size_t s1) {
        constexpr std::size_t kBlock = 1024;
        std::array<double, kBlock> y;
        std::array<double, kBlock> dw;
        std::array<double, kBlock> dn;
        for (std::size_t s = s0; s < s1; s += kBlock) {
            const std::size_t width = std::min(kBlock, s1 - s);
            for (std::size_t i = 0; i < width; ++i) {
                const CounterRng rng(RandomSource{cfg.seed, s + i});
                y[i] = 1.0;
                dw[i] = sqrt_dt * rng.normal(0, 0);
                dn[i] = lin.lambda == 0.0
                            ? 0.0
                            : static_cast<double>(rng.poisson(0, mean_events));
            }
            linear_scheme_step(kp, y.data(), dw.data(), dn.data(), y.data(), width);
            for (std::size_t i = 0; i < width; ++i) {
                y2[s + i] = y[i] * y[i];
            }
        }
    });

    double sum = 0.0;
    for (const double v : y2) {
        sum += v;
    }
    const double n = static_cast<double>(cfg.samples);
    const double mean = sum / n;
    double ss = 0.0;
    for (const double v : y2) {
        ss += (v - mean) * (v - mean);
    }
    const double variance = ss / (n - 1.0);
    const double std_error = std::sqrt(variance / n);

    AmplificationResult out;
    out.dt = dt;
    out.predicted = predicted;
    out.empirical = mean;
    out.std_error = std_error;
    if (std_error > 0.0) {
        out.z = (mean - predicted) / std_error;
    } else {
        out.z = mean == predicted ? 0.0 : std::copysign(kInf, mean - predicted);
    }
    return out;
}

}  // namespace jsde
