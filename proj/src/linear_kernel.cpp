// SPDX-License-Identifier: MIT

#include "jsde/linear_kernel.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace jsde {

bool linear_kernel_supported(const JumpSdeProblem& problem, const SchemeSpec& scheme) {
    if (!problem.linear) {
        return false;
    }
    if (scheme_uses_split(scheme.kind)) {
        return scheme.split && scheme.split->v_zero;
    }
    return true;
}

LinearKernelParams make_linear_kernel_params(const LinearJumpSde& lin, SchemeKind kind,
                                             double theta, double dt) {
    LinearKernelParams p;
    p.a = lin.a;
    p.b = lin.b;
    p.c = lin.c;
    p.dt = dt;
    double eff_theta = 0.0;
    double implicit_coef = 0.0;
    switch (kind) {
        case SchemeKind::ExplicitEuler:
        case SchemeKind::SemiTamed:  // v == 0 split: the step is explicit Euler
            break;
        case SchemeKind::Stm:
            eff_theta = theta;
            implicit_coef = lin.a;
            break;
        case SchemeKind::Cstm:
            if (theta != 0.0) {  // theta = 0 evaluates in count space, as Euler
                eff_theta = theta;
                p.lam_h = lin.lambda;
                p.shift = lin.lambda * dt;
                implicit_coef = lin.a + lin.lambda * lin.c;
            }
            break;
        case SchemeKind::CompensatedSemiTamed:
            // Defined through the compensated increment, then mapped back to
            // counts: dn_eff = (dn - lambda*dt) + lambda*dt, not dn itself.
            p.shift = lin.lambda * dt;
            p.add_back = true;
            break;
        case SchemeKind::Tamed:
            p.tame = true;
            break;
        case SchemeKind::CompensatedTamed:
            p.tame = true;
            p.lam_h = lin.lambda;
            p.shift = lin.lambda * dt;
            break;
    }
    p.om = 1.0 - eff_theta;
    p.denom = 1.0 - (eff_theta * dt) * implicit_coef;
    if (p.denom == 0.0) {
        throw SolverError("implicit stage singular: 1 - theta*dt*A == 0", 0.0);
    }
    return p;
}

void linear_scheme_step_scalar(const LinearKernelParams& p, const double* y, const double* dw,
                               const double* dn, double* out, std::size_t n) {
    const double a = p.a;
    const double b = p.b;
    const double c = p.c;
    const double lam_h = p.lam_h;
    const double om = p.om;
    const double dt = p.dt;
    const double shift = p.shift;
    const double denom = p.denom;
    const bool add_back = p.add_back;
    if (p.tame) {
        for (std::size_t i = 0; i < n; ++i) {
            const double yi = y[i];
            const double f = a * yi;
            const double h = c * yi;
            const double fl = f + lam_h * h;
            const double dterm = (dt * fl) / (1.0 + dt * std::abs(fl));
            const double dn0 = dn[i] - shift;
            const double dn_eff = add_back ? dn0 + shift : dn0;
            out[i] = (((yi + dterm) + (b * yi) * dw[i]) + h * dn_eff) / denom;
        }
        return;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double yi = y[i];
        const double f = a * yi;
        const double h = c * yi;
        const double fl = f + lam_h * h;
        const double dterm = (om * fl) * dt;
        const double dn0 = dn[i] - shift;
        const double dn_eff = add_back ? dn0 + shift : dn0;
        out[i] = (((yi + dterm) + (b * yi) * dw[i]) + h * dn_eff) / denom;
    }
}

namespace {

KernelIsa detect_kernel_isa() {
#if defined(__x86_64__) || defined(_M_X64)
    const bool have_avx2 = __builtin_cpu_supports("avx2");
#else
    const bool have_avx2 = false;
#endif
    if (const char* env = std::getenv("JSDE_KERNEL")) {
        const std::string want(env);
        if (want == "scalar") return KernelIsa::Scalar;
        if (want == "avx2" && have_avx2) return KernelIsa::Avx2;
        // Unrecognized or unavailable requests fall back to autodetect.
    }
    return have_avx2 ? KernelIsa::Avx2 : KernelIsa::Scalar;
}

}  // namespace

KernelIsa active_kernel_isa() {
    static const KernelIsa isa = detect_kernel_isa();
    return isa;
}

const char* kernel_isa_name(KernelIsa isa) {
    return isa == KernelIsa::Avx2 ? "avx2" : "scalar";
}

void linear_scheme_step(const LinearKernelParams& p, const double* y, const double* dw,
                        const double* dn, double* out, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
    if (active_kernel_isa() == KernelIsa::Avx2) {
        linear_scheme_step_avx2(p, y, dw, dn, out, n);
        return;
    }
#endif
    linear_scheme_step_scalar(p, y, dw, dn, out, n);
}

}  // namespace jsde
