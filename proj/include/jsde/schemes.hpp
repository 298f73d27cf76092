// SPDX-License-Identifier: MIT
#pragma once
//
// One-step maps and path integrators for the jump-diffusion schemes:
//
//   explicit Euler      Y+ = Y + f(Y)dt + g(Y)dW + h(Y)dN
//   STM                 Y+ = Y + (1-t)f(Y)dt + t*f(Y+)dt + g(Y)dW + h(Y)dN
//   CSTM                as STM with f_lambda and the compensated increment dNbar
//   tamed               Y+ = Y + dt*f(Y)/(1+dt|f(Y)|) + g(Y)dW + h(Y)dN
//   compensated tamed   as tamed with f_lambda and dNbar
//   semi-tamed          Y+ = Y + u(Y)dt + dt*v(Y)/(1+dt|v(Y)|) + g(Y)dW + h(Y)dN
//
// The compensated semi-tamed scheme is the semi-tamed kernel evaluated at
// dN = dNbar + lambda*dt; it is exposed as its own entry point but shares the
// kernel, so the algebraic identity between the two holds exactly in floating
// point.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "jsde/increments.hpp"
#include "jsde/problem.hpp"

namespace jsde {

enum class SchemeKind {
    ExplicitEuler,
    Stm,
    Cstm,
    Tamed,
    CompensatedTamed,
    SemiTamed,
    CompensatedSemiTamed,
};

// Canonical name strings used in config files and CSV output.
std::string scheme_name(SchemeKind kind);
SchemeKind scheme_from_name(const std::string& name);
bool scheme_uses_theta(SchemeKind kind);
bool scheme_uses_split(SchemeKind kind);

// Settings for the implicit stage of STM/CSTM with theta > 0. The default is
// fixed-point iteration seeded at the explicit Euler predictor, falling back
// to damped Newton with a forward-difference Jacobian when the contraction
// fails; NewtonNumericJacobian starts with Newton directly.
struct ImplicitSolveConfig {
    enum class Method { FixedPoint, NewtonNumericJacobian };
    double tolerance = 1e-12;
    std::size_t max_iterations = 100;
    Method method = Method::FixedPoint;
};

struct SchemeSpec {
    SchemeKind kind = SchemeKind::ExplicitEuler;
    double theta = 0.0;                 // STM/CSTM only, in [0,1]
    std::optional<DriftSplit> split;    // semi-tamed kinds only
    ImplicitSolveConfig implicit;
};

// Thrown when the implicit stage fails to converge; carries the residual of
// the best iterate.
class SolverError : public std::runtime_error {
  public:
    SolverError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

  private:
    double residual_;
};

// A simulated path on a uniform grid. Once a step produces a non-finite
// state, integration stops: diverged_at holds that step's index (0-based) and
// states contains only the finite prefix (x0 plus the results of the steps
// before it). Divergence is a data outcome, not an error.
struct Trajectory {
    std::vector<double> times;
    std::vector<double> states;
    std::optional<std::size_t> diverged_at;
};

// One-step maps. dN is the raw event count for uncompensated schemes; dNbar
// the compensated increment dN - lambda*dt for compensated ones.
double step_explicit_euler(const JumpSdeProblem& problem, double y, double dw, double dn,
                           double dt);
double step_stm(const JumpSdeProblem& problem, double theta, double y, double dw, double dn,
                double dt, const ImplicitSolveConfig& implicit = {});
double step_cstm(const JumpSdeProblem& problem, double theta, double y, double dw,
                 double dnbar, double dt, const ImplicitSolveConfig& implicit = {});
double step_tamed(const JumpSdeProblem& problem, double y, double dw, double dn, double dt);
double step_compensated_tamed(const JumpSdeProblem& problem, double y, double dw,
                              double dnbar, double dt);
double step_semi_tamed(const JumpSdeProblem& problem, const DriftSplit& split, double y,
                       double dw, double dn, double dt);
double step_compensated_semi_tamed(const JumpSdeProblem& problem, const DriftSplit& split,
                                   double y, double dw, double dnbar, double dt);

// Throws std::invalid_argument when the spec is inconsistent: theta outside
// [0, 1] for a theta scheme, or a semi-tamed kind without a split.
void validate_scheme(const SchemeSpec& scheme);

// One step of `scheme` from state y over dt. `count` holds the raw event
// count; compensation happens internally per scheme, exactly as in
// integrate_path (this is the per-step dispatch the integrators are built
// on). The spec is not re-validated here; call validate_scheme once before
// stepping in a loop.
double scheme_step(const JumpSdeProblem& problem, const SchemeSpec& scheme, double y,
                   double dw, double count, double dt);

// Integrates one path on the grid coarsened by `ratio` (step dt =
// ratio * dt_fine), forming each coarse increment as the block sum of fine
// increments. Compensated schemes receive dNbar = (block count) - lambda*dt.
// For Cstm with theta == 0 the update is evaluated in count space via the
// explicit-Euler expression (the compensation terms cancel algebraically);
// this keeps the CSTM(0) == STM(0) identity exact in floating point.
// Throws std::invalid_argument when ratio does not divide grid.n_steps, and
// propagates SolverError from implicit stages.
Trajectory integrate_path(const JumpSdeProblem& problem, const SchemeSpec& scheme,
                          const IncrementGrid& grid, std::size_t ratio = 1);

// Endpoint-only variant used by the Monte Carlo drivers; arithmetic is
// identical to integrate_path, only the recording differs.
struct Endpoint {
    double value;
    bool diverged;
};
Endpoint integrate_endpoint(const JumpSdeProblem& problem, const SchemeSpec& scheme,
                            const IncrementGrid& grid, std::size_t ratio = 1);

}  // namespace jsde
