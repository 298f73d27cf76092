// SPDX-License-Identifier: MIT
#pragma once
//
// Problem definitions for scalar jump-diffusion SDEs
//
//   dX(t) = f(X(t-)) dt + g(X(t-)) dW(t) + h(X(t-)) dN(t),
//
// where W is Brownian motion and N a Poisson process of intensity lambda.
// State and noise are one-dimensional throughout; multi-dimensional states
// and marked jumps are out of scope.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace jsde {

using ScalarFn = std::function<double(double)>;

// Drift decomposition f = u + v for semi-tamed stepping: u is the globally
// Lipschitz part, v the one-sided-Lipschitz polynomial-growth part. The sum
// must reproduce the problem's drift pointwise. `v_zero` marks a split whose
// tamed part is identically zero, which lets linear sweeps take the batch
// kernel path; it is an optimization hint only.
struct DriftSplit {
    ScalarFn u;
    ScalarFn v;
    bool v_zero = false;
};

// The linear test equation dX = aX dt + bX dW + cX dN. Exact-solution
// operations additionally require c > -1.
struct LinearJumpSde {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double lambda = 0.0;
    double x0 = 1.0;
};

// A scalar jump-diffusion problem. `linear` is populated when the problem is
// known to be the linear test equation; integrators use it to replace the
// implicit stage with the closed-form division and stability sweeps use it to
// select the vectorized kernels.
struct JumpSdeProblem {
    ScalarFn drift;
    ScalarFn diffusion;
    ScalarFn jump;
    double lambda = 0.0;
    double x0 = 0.0;
    std::optional<LinearJumpSde> linear;
};

// f_lambda(x) = f(x) + lambda*h(x): the drift of the SDE rewritten against
// the compensated process N(t) - lambda*t.
double compensated_drift(const JumpSdeProblem& problem, double x);

// Wraps the linear equation as a JumpSdeProblem with f=ax, g=bx, h=cx.
JumpSdeProblem as_problem(const LinearJumpSde& linear);

// Exact solution of the linear equation given the driving values at time t:
//   X(t) = x0 * exp((a - b^2/2) t + b W_t) * (1+c)^{N_t}.
// Throws std::invalid_argument for c <= -1 (logarithm undefined) or t < 0.
double exact_linear_solution(const LinearJumpSde& linear, double t, double w_t,
                             std::uint64_t n_t);

// Second-moment law E|X(t)|^2 = x0^2 * exp(l t) with l = 2a + b^2 + lambda*c*(2+c).
double exact_linear_second_moment(const LinearJumpSde& linear, double t);

// A named problem plus the optional extras the experiments need.
struct ProblemBundle {
    std::string name;
    JumpSdeProblem problem;
    std::optional<DriftSplit> split;
};

// Built-in test problems:
//   linear       a,b,c,lambda,x0 (defaults 1,1,0.5,1,1); split u=ax, v=0
//   quartic      f=-x^4, g=h=x, lambda=1, x0=1; split u=0, v=-x^4
//   cubic_split  f=-4x-x^3 with split u=-4x, v=-x^3; g=h=x, lambda=1, x0=1
// Parameters given in `params` override the defaults (unknown keys throw).
// Unknown names throw std::invalid_argument.
ProblemBundle builtin_problem(const std::string& name,
                              const std::vector<std::pair<std::string, double>>& params = {});

// Names accepted by builtin_problem, for CLI validation and help text.
std::vector<std::string> builtin_problem_names();

}  // namespace jsde
