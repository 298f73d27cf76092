// SPDX-License-Identifier: MIT

#include "jsde/schemes.hpp"

#include <cmath>

namespace jsde {

std::string scheme_name(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::ExplicitEuler: return "explicit-euler";
        case SchemeKind::Stm: return "stm";
        case SchemeKind::Cstm: return "cstm";
        case SchemeKind::Tamed: return "tamed";
        case SchemeKind::CompensatedTamed: return "compensated-tamed";
        case SchemeKind::SemiTamed: return "semi-tamed";
        case SchemeKind::CompensatedSemiTamed: return "compensated-semi-tamed";
    }
    throw std::invalid_argument("unknown scheme kind");
}

SchemeKind scheme_from_name(const std::string& name) {
    if (name == "explicit-euler") return SchemeKind::ExplicitEuler;
    if (name == "stm") return SchemeKind::Stm;
    if (name == "cstm") return SchemeKind::Cstm;
    if (name == "tamed") return SchemeKind::Tamed;
    if (name == "compensated-tamed") return SchemeKind::CompensatedTamed;
    if (name == "semi-tamed") return SchemeKind::SemiTamed;
    if (name == "compensated-semi-tamed") return SchemeKind::CompensatedSemiTamed;
    throw std::invalid_argument("unknown scheme '" + name + "'");
}

bool scheme_uses_theta(SchemeKind kind) {
    return kind == SchemeKind::Stm || kind == SchemeKind::Cstm;
}

bool scheme_uses_split(SchemeKind kind) {
    return kind == SchemeKind::SemiTamed || kind == SchemeKind::CompensatedSemiTamed;
}

namespace {

// Shared explicit update. Evaluation order is fixed so that schemes which
// reduce to this expression reduce to it bitwise.
inline double explicit_update(double y, double drift_term, double g, double dw, double h,
                              double jump_increment) {
    return ((y + drift_term) + g * dw) + h * jump_increment;
}

// Solves Y - theta*dt*F(Y) = rhs for the implicit stage. `fprime_hint` is the
// closed-form derivative when the drift is linear (enables the exact one-shot
// solve); otherwise the nonlinear machinery applies.
double solve_implicit_stage(const ScalarFn& F, double theta_dt, double rhs,
                            const ImplicitSolveConfig& cfg, const double* linear_coef) {
    // Divergence is data: a non-finite right-hand side cannot be solved and
    // is passed through so integrators record it as a diverged state.
    if (!std::isfinite(rhs)) {
        return rhs;
    }
    if (linear_coef != nullptr) {
        // F(Y) = A*Y: the stage is the closed-form division rhs / (1 - theta*dt*A).
        const double denom = 1.0 - theta_dt * (*linear_coef);
        if (denom == 0.0) {
            throw SolverError("implicit stage singular: 1 - theta*dt*A == 0", rhs);
        }
        return rhs / denom;
    }

    double y = rhs + theta_dt * F(rhs);  // explicit predictor
    double residual = std::abs(y - theta_dt * F(y) - rhs);

    if (cfg.method == ImplicitSolveConfig::Method::FixedPoint) {
        for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
            const double next = rhs + theta_dt * F(y);
            if (!std::isfinite(next)) {
                break;  // contraction lost, try Newton below
            }
            const double moved = std::abs(next - y);
            y = next;
            residual = std::abs(y - theta_dt * F(y) - rhs);
            if (moved <= cfg.tolerance && residual <= cfg.tolerance) {
                return y;
            }
        }
        if (!std::isfinite(y)) {
            y = rhs + theta_dt * F(rhs);  // restart Newton from the predictor
        }
    }

    // Damped Newton on G(Y) = Y - theta*dt*F(Y) - rhs with a forward-difference
    // Jacobian (perturbation 1e-7 * (1 + |Y|)).
    residual = std::abs(y - theta_dt * F(y) - rhs);
    for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
        if (residual <= cfg.tolerance) {
            return y;
        }
        const double G = y - theta_dt * F(y) - rhs;
        const double eps = 1e-7 * (1.0 + std::abs(y));
        const double Gp = ((y + eps) - theta_dt * F(y + eps) - rhs - G) / eps;
        if (Gp == 0.0 || !std::isfinite(Gp)) {
            break;
        }
        double step = -G / Gp;
        double candidate = y + step;
        double cand_res = std::abs(candidate - theta_dt * F(candidate) - rhs);
        int halvings = 0;
        while ((!std::isfinite(cand_res) || cand_res >= residual) && halvings < 30) {
            step *= 0.5;
            candidate = y + step;
            cand_res = std::abs(candidate - theta_dt * F(candidate) - rhs);
            ++halvings;
        }
        if (!(cand_res < residual)) {
            break;
        }
        y = candidate;
        residual = cand_res;
    }
    if (residual <= cfg.tolerance) {
        return y;
    }
    throw SolverError("implicit stage did not converge", residual);
}

// Tamed drift increment dt*x/(1+dt*|x|); norm of the result is < 1 for all x.
inline double tamed_term(double dt, double fx) {
    return (dt * fx) / (1.0 + dt * std::abs(fx));
}

}  // namespace

double step_explicit_euler(const JumpSdeProblem& problem, double y, double dw, double dn,
                           double dt) {
    return explicit_update(y, problem.drift(y) * dt, problem.diffusion(y), dw,
                           problem.jump(y), dn);
}

double step_stm(const JumpSdeProblem& problem, double theta, double y, double dw, double dn,
                double dt, const ImplicitSolveConfig& implicit) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("step requires dt > 0");
    }
    if (theta == 0.0) {
        return step_explicit_euler(problem, y, dw, dn, dt);
    }
    const double rhs = explicit_update(y, (1.0 - theta) * problem.drift(y) * dt,
                                       problem.diffusion(y), dw, problem.jump(y), dn);
    const double* lin = nullptr;
    double a = 0.0;
    if (problem.linear) {
        a = problem.linear->a;
        lin = &a;
    }
    return solve_implicit_stage(problem.drift, theta * dt, rhs, implicit, lin);
}

double step_cstm(const JumpSdeProblem& problem, double theta, double y, double dw,
                 double dnbar, double dt, const ImplicitSolveConfig& implicit) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("step requires dt > 0");
    }
    if (theta == 0.0) {
        // The compensation terms cancel: f_lambda*dt + h*(dN - lambda*dt) =
        // f*dt + h*dN. Evaluating in count space keeps the theta=0 identity
        // with STM exact in floating point.
        return step_explicit_euler(problem, y, dw, dnbar + problem.lambda * dt, dt);
    }
    const auto f_lambda = [&problem](double x) { return compensated_drift(problem, x); };
    const double rhs = explicit_update(y, (1.0 - theta) * f_lambda(y) * dt,
                                       problem.diffusion(y), dw, problem.jump(y), dnbar);
    const double* lin = nullptr;
    double a_comp = 0.0;
    if (problem.linear) {
        a_comp = problem.linear->a + problem.lambda * problem.linear->c;
        lin = &a_comp;
    }
    return solve_implicit_stage(f_lambda, theta * dt, rhs, implicit, lin);
}

double step_tamed(const JumpSdeProblem& problem, double y, double dw, double dn, double dt) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("step requires dt > 0");
    }
    return explicit_update(y, tamed_term(dt, problem.drift(y)), problem.diffusion(y), dw,
                           problem.jump(y), dn);
}

double step_compensated_tamed(const JumpSdeProblem& problem, double y, double dw,
                              double dnbar, double dt) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("step requires dt > 0");
    }
    return explicit_update(y, tamed_term(dt, compensated_drift(problem, y)),
                           problem.diffusion(y), dw, problem.jump(y), dnbar);
}

double step_semi_tamed(const JumpSdeProblem& problem, const DriftSplit& split, double y,
                       double dw, double dn, double dt) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("step requires dt > 0");
    }
    const double drift_term = split.u(y) * dt + tamed_term(dt, split.v(y));
    return explicit_update(y, drift_term, problem.diffusion(y), dw, problem.jump(y), dn);
}

double step_compensated_semi_tamed(const JumpSdeProblem& problem, const DriftSplit& split,
                                   double y, double dw, double dnbar, double dt) {
    // One kernel: the compensated form equals the semi-tamed step at
    // dN = dNbar + lambda*dt (the lambda*h*dt term regroups into the count).
    return step_semi_tamed(problem, split, y, dw, dnbar + problem.lambda * dt, dt);
}

namespace {

// Per-step dispatch used by both integrators. Coarse increments arrive as the
// block sums (dw, count); compensation happens here, per scheme.
inline double dispatch_step(const JumpSdeProblem& problem, const SchemeSpec& scheme,
                            double y, double dw, double count, double dt) {
    switch (scheme.kind) {
        case SchemeKind::ExplicitEuler:
            return step_explicit_euler(problem, y, dw, count, dt);
        case SchemeKind::Stm:
            return step_stm(problem, scheme.theta, y, dw, count, dt, scheme.implicit);
        case SchemeKind::Cstm:
            if (scheme.theta == 0.0) {
                // Count-space evaluation (see header); bitwise-equal to the
                // STM theta=0 path for the same increments.
                return step_explicit_euler(problem, y, dw, count, dt);
            }
            return step_cstm(problem, scheme.theta, y, dw, count - problem.lambda * dt, dt,
                             scheme.implicit);
        case SchemeKind::Tamed:
            return step_tamed(problem, y, dw, count, dt);
        case SchemeKind::CompensatedTamed:
            return step_compensated_tamed(problem, y, dw, count - problem.lambda * dt, dt);
        case SchemeKind::SemiTamed:
            return step_semi_tamed(problem, *scheme.split, y, dw, count, dt);
        case SchemeKind::CompensatedSemiTamed:
            return step_compensated_semi_tamed(problem, *scheme.split, y, dw,
                                               count - problem.lambda * dt, dt);
    }
    throw std::invalid_argument("unknown scheme kind");
}

}  // namespace

void validate_scheme(const SchemeSpec& scheme) {
    if (scheme_uses_theta(scheme.kind) && !(scheme.theta >= 0.0 && scheme.theta <= 1.0)) {
        throw std::invalid_argument("theta must lie in [0, 1]");
    }
    if (scheme_uses_split(scheme.kind) && !scheme.split) {
        throw std::invalid_argument(scheme_name(scheme.kind) + " requires a drift split");
    }
}

double scheme_step(const JumpSdeProblem& problem, const SchemeSpec& scheme, double y,
                   double dw, double count, double dt) {
    return dispatch_step(problem, scheme, y, dw, count, dt);
}

Trajectory integrate_path(const JumpSdeProblem& problem, const SchemeSpec& scheme,
                          const IncrementGrid& grid, std::size_t ratio) {
    validate_scheme(scheme);
    if (ratio == 0 || (grid.n_steps % ratio) != 0) {
        throw std::invalid_argument("ratio must divide the number of fine steps");
    }
    const std::size_t n = grid.n_steps / ratio;
    const double dt = grid.dt_fine * static_cast<double>(ratio);

    Trajectory out;
    out.times.reserve(n + 1);
    out.states.reserve(n + 1);
    out.times.push_back(0.0);
    out.states.push_back(problem.x0);

    double y = problem.x0;
    for (std::size_t k = 0; k < n; ++k) {
        double dw = 0.0;
        std::uint64_t count = 0;
        for (std::size_t r = 0; r < ratio; ++r) {
            dw += grid.dw(k * ratio + r);
            count += grid.dn(k * ratio + r);
        }
        const double next =
            dispatch_step(problem, scheme, y, dw, static_cast<double>(count), dt);
        if (!std::isfinite(next)) {
            out.diverged_at = k;
            return out;
        }
        y = next;
        out.times.push_back(static_cast<double>(k + 1) * dt);
        out.states.push_back(y);
    }
    return out;
}

Endpoint integrate_endpoint(const JumpSdeProblem& problem, const SchemeSpec& scheme,
                            const IncrementGrid& grid, std::size_t ratio) {
    validate_scheme(scheme);
    if (ratio == 0 || (grid.n_steps % ratio) != 0) {
        throw std::invalid_argument("ratio must divide the number of fine steps");
    }
    const std::size_t n = grid.n_steps / ratio;
    const double dt = grid.dt_fine * static_cast<double>(ratio);
    double y = problem.x0;
    for (std::size_t k = 0; k < n; ++k) {
        double dw = 0.0;
        std::uint64_t count = 0;
        for (std::size_t r = 0; r < ratio; ++r) {
            dw += grid.dw(k * ratio + r);
            count += grid.dn(k * ratio + r);
        }
        const double next =
            dispatch_step(problem, scheme, y, dw, static_cast<double>(count), dt);
        if (!std::isfinite(next)) {
            return {y, true};
        }
        y = next;
    }
    return {y, false};
}

}  // namespace jsde
