// SPDX-License-Identifier: MIT
#pragma once
//
// Batch one-step kernels for the linear test equation, used by stability
// sweeps and the one-step amplification sampler where millions of identical
// linear updates dominate the runtime.
//
// Two variants exist: a scalar reference and an AVX2 one, selected at runtime
// by CPU capability (overridable via the JSDE_KERNEL environment variable,
// values "scalar" or "avx2"). Both perform the identical per-lane operation
// sequence using only +, -, *, /, and |.|, with floating-point contraction
// disabled, so their outputs are bitwise equal; tests enforce this. The
// sequence also mirrors the generic steppers' evaluation order exactly, so a
// sweep produces the same numbers whether or not it takes the kernel path.
// Kernels never reduce across lanes, which keeps results independent of how
// a batch is partitioned.

#include <cstddef>

#include "jsde/problem.hpp"
#include "jsde/schemes.hpp"

namespace jsde {

// Coefficients for one step of any supported scheme on dX = aX dt + bX dW +
// cX dN. Per lane, with raw event count dn:
//
//   f  = a*y;  h = c*y;  fl = f + lam_h*h
//   dterm = tame ? (dt*fl) / (1 + dt*|fl|) : (om*fl)*dt
//   dn0 = dn - shift;  dn_eff = add_back ? dn0 + shift : dn0
//   out = (((y + dterm) + (b*y)*dw) + h*dn_eff) / denom
//
// where lam_h folds the compensation lambda*h into the drift, om = 1-theta
// weights the explicit drift portion, shift = lambda*dt moves counts to the
// compensated increment, add_back restores the raw count for schemes defined
// through the compensated one, and denom = 1 - theta*dt*A is the implicit
// stage denominator (1 for explicit schemes; division by 1 is exact).
struct LinearKernelParams {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double lam_h = 0.0;
    double om = 1.0;
    double dt = 0.0;
    double shift = 0.0;
    double denom = 1.0;
    bool add_back = false;
    bool tame = false;
};

// True when the scheme admits a linear kernel for this problem: the problem
// must carry linear coefficients, and the semi-tamed family additionally
// needs a split whose tamed part is identically zero (split.v_zero).
bool linear_kernel_supported(const JumpSdeProblem& problem, const SchemeSpec& scheme);

// Builds kernel coefficients for the scheme on the linear equation. theta is
// read only by the theta schemes. Throws SolverError when the implicit
// denominator vanishes, matching the generic stepper's behavior.
LinearKernelParams make_linear_kernel_params(const LinearJumpSde& lin, SchemeKind kind,
                                             double theta, double dt);

// Dispatched batch step: out[i] = one step from y[i] with increments
// (dw[i], dn[i]), dn holding raw event counts. In-place use (out == y) is
// allowed.
void linear_scheme_step(const LinearKernelParams& p, const double* y, const double* dw,
                        const double* dn, double* out, std::size_t n);

// Direct entry points for the equivalence tests.
void linear_scheme_step_scalar(const LinearKernelParams& p, const double* y, const double* dw,
                               const double* dn, double* out, std::size_t n);
#if defined(__x86_64__) || defined(_M_X64)
void linear_scheme_step_avx2(const LinearKernelParams& p, const double* y, const double* dw,
                             const double* dn, double* out, std::size_t n);
#endif

enum class KernelIsa { Scalar, Avx2 };

// The variant the dispatched entry point uses in this process.
KernelIsa active_kernel_isa();
const char* kernel_isa_name(KernelIsa isa);

}  // namespace jsde
