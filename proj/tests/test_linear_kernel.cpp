// SPDX-License-Identifier: MIT
#include "jsde/linear_kernel.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "jsde/problem.hpp"
#include "jsde/rng.hpp"
#include "jsde/schemes.hpp"

namespace {

using jsde::builtin_problem;
using jsde::LinearJumpSde;
using jsde::LinearKernelParams;
using jsde::SchemeKind;
using jsde::SchemeSpec;

const SchemeKind kAllKinds[] = {
    SchemeKind::ExplicitEuler,       SchemeKind::Stm,
    SchemeKind::Cstm,                SchemeKind::Tamed,
    SchemeKind::CompensatedTamed,    SchemeKind::SemiTamed,
    SchemeKind::CompensatedSemiTamed,
};

struct Batch {
    std::vector<double> y, dw, dn;
};

Batch random_batch(std::size_t n, double dt, double lambda, std::uint64_t seed) {
    const jsde::CounterRng rng(jsde::RandomSource{seed, 0});
    Batch b;
    b.y.resize(n);
    b.dw.resize(n);
    b.dn.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        b.y[i] = 3.0 * rng.normal(i, 0);
        b.dw[i] = std::sqrt(dt) * rng.normal(i, 1);
        b.dn[i] = lambda == 0.0 ? 0.0 : static_cast<double>(rng.poisson(i, lambda * dt));
    }
    return b;
}

TEST(LinearKernel, SupportRequiresLinearCoefficientsAndZeroTamedPart) {
    const jsde::ProblemBundle lin = builtin_problem("linear", {});
    const jsde::ProblemBundle quartic = builtin_problem("quartic", {});
    const SchemeSpec euler{SchemeKind::ExplicitEuler, 0.0, std::nullopt, {}};
    EXPECT_TRUE(jsde::linear_kernel_supported(lin.problem, euler));
    EXPECT_FALSE(jsde::linear_kernel_supported(quartic.problem, euler));

    SchemeSpec semi{SchemeKind::SemiTamed, 0.0, lin.split, {}};
    EXPECT_TRUE(jsde::linear_kernel_supported(lin.problem, semi));
    semi.split = quartic.split;  // tamed part not identically zero
    EXPECT_FALSE(jsde::linear_kernel_supported(lin.problem, semi));
    semi.split = std::nullopt;
    EXPECT_FALSE(jsde::linear_kernel_supported(lin.problem, semi));
}

TEST(LinearKernel, SingularImplicitDenominatorThrowsLikeTheStepper) {
    const LinearJumpSde lin{2.0, 0.0, 0.0, 0.0, 1.0};
    EXPECT_THROW(jsde::make_linear_kernel_params(lin, SchemeKind::Stm, 1.0, 0.5),
                 jsde::SolverError);
}

// The kernel's whole reason to exist is that it reproduces the generic
// steppers bitwise; check every supported scheme over random states,
// increments, and both small and large steps.
TEST(LinearKernel, MatchesGenericStepperBitwise) {
    const LinearJumpSde lin{-1.0, 2.0, -0.9, 9.0, 1.0};
    const jsde::ProblemBundle bundle =
        builtin_problem("linear", {{"a", lin.a}, {"b", lin.b}, {"c", lin.c},
                                   {"lambda", lin.lambda}});
    for (SchemeKind kind : kAllKinds) {
        for (double theta : {0.0, 0.3, 1.0}) {
            for (double dt : {1.0 / 64.0, 0.3, 25.0}) {
                SchemeSpec spec{kind, theta, std::nullopt, {}};
                if (jsde::scheme_uses_split(kind)) {
                    spec.split = bundle.split;
                }
                if (!jsde::scheme_uses_theta(kind) && theta != 0.0) {
                    continue;
                }
                const LinearKernelParams p =
                    jsde::make_linear_kernel_params(lin, kind, theta, dt);
                const Batch b = random_batch(257, dt, lin.lambda, 91);
                std::vector<double> out(b.y.size());
                jsde::linear_scheme_step(p, b.y.data(), b.dw.data(), b.dn.data(), out.data(),
                                         b.y.size());
                for (std::size_t i = 0; i < b.y.size(); ++i) {
                    const double expect = jsde::scheme_step(bundle.problem, spec, b.y[i],
                                                            b.dw[i], b.dn[i], dt);
                    ASSERT_EQ(out[i], expect)
                        << jsde::scheme_name(kind) << " theta " << theta << " dt " << dt
                        << " lane " << i;
                }
            }
        }
    }
}

TEST(LinearKernel, InPlaceUpdateMatchesOutOfPlace) {
    const LinearJumpSde lin{1.0, 1.0, 0.5, 1.0, 1.0};
    const LinearKernelParams p =
        jsde::make_linear_kernel_params(lin, SchemeKind::Cstm, 0.5, 0.125);
    Batch b = random_batch(100, 0.125, lin.lambda, 7);
    std::vector<double> out(b.y.size());
    jsde::linear_scheme_step(p, b.y.data(), b.dw.data(), b.dn.data(), out.data(), b.y.size());
    jsde::linear_scheme_step(p, b.y.data(), b.dw.data(), b.dn.data(), b.y.data(), b.y.size());
    EXPECT_EQ(b.y, out);
}

#if defined(__x86_64__) || defined(_M_X64)
TEST(LinearKernel, Avx2MatchesScalarBitwise) {
    if (!__builtin_cpu_supports("avx2")) {
        GTEST_SKIP() << "host has no AVX2";
    }
    // Odd length exercises the vector body and the scalar tail together.
    for (SchemeKind kind : kAllKinds) {
        const LinearJumpSde lin{-1.0, 2.0, -0.9, 9.0, 1.0};
        const double dt = 0.1;
        const LinearKernelParams p = jsde::make_linear_kernel_params(lin, kind, 0.7, dt);
        const Batch b = random_batch(1003, dt, lin.lambda, 113);
        std::vector<double> scalar_out(b.y.size());
        std::vector<double> avx_out(b.y.size());
        jsde::linear_scheme_step_scalar(p, b.y.data(), b.dw.data(), b.dn.data(),
                                        scalar_out.data(), b.y.size());
        jsde::linear_scheme_step_avx2(p, b.y.data(), b.dw.data(), b.dn.data(),
                                      avx_out.data(), b.y.size());
        for (std::size_t i = 0; i < b.y.size(); ++i) {
            ASSERT_EQ(scalar_out[i], avx_out[i])
                << jsde::scheme_name(kind) << " lane " << i;
        }
    }
}
#endif

TEST(LinearKernel, ActiveIsaIsReportable) {
    const jsde::KernelIsa isa = jsde::active_kernel_isa();
    const std::string name = jsde::kernel_isa_name(isa);
    EXPECT_TRUE(name == "scalar" || name == "avx2");
}

}  // namespace
