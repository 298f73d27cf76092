// SPDX-License-Identifier: MIT
//
// AVX2 variant of the linear batch kernel. Compiled with -mavx2 and
// -ffp-contract=off in its own translation unit; every intrinsic below maps
// to the same IEEE operation the scalar reference performs per lane, in the
// same order, so outputs are bitwise identical (|.| is a sign-bit mask, the
// exact behavior of std::abs on doubles).

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "jsde/linear_kernel.hpp"

namespace jsde {

void linear_scheme_step_avx2(const LinearKernelParams& p, const double* y, const double* dw,
                             const double* dn, double* out, std::size_t n) {
    const __m256d va = _mm256_set1_pd(p.a);
    const __m256d vb = _mm256_set1_pd(p.b);
    const __m256d vc = _mm256_set1_pd(p.c);
    const __m256d vlam = _mm256_set1_pd(p.lam_h);
    const __m256d vom = _mm256_set1_pd(p.om);
    const __m256d vdt = _mm256_set1_pd(p.dt);
    const __m256d vshift = _mm256_set1_pd(p.shift);
    const __m256d vdenom = _mm256_set1_pd(p.denom);
    const __m256d vone = _mm256_set1_pd(1.0);
    const __m256d sign_mask = _mm256_set1_pd(-0.0);

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vy = _mm256_loadu_pd(y + i);
        const __m256d f = _mm256_mul_pd(va, vy);
        const __m256d h = _mm256_mul_pd(vc, vy);
        const __m256d fl = _mm256_add_pd(f, _mm256_mul_pd(vlam, h));
        __m256d dterm;
        if (p.tame) {
            const __m256d num = _mm256_mul_pd(vdt, fl);
            const __m256d afl = _mm256_andnot_pd(sign_mask, fl);
            const __m256d den = _mm256_add_pd(vone, _mm256_mul_pd(vdt, afl));
            dterm = _mm256_div_pd(num, den);
        } else {
            dterm = _mm256_mul_pd(_mm256_mul_pd(vom, fl), vdt);
        }
        const __m256d dn0 = _mm256_sub_pd(_mm256_loadu_pd(dn + i), vshift);
        const __m256d dn_eff = p.add_back ? _mm256_add_pd(dn0, vshift) : dn0;
        const __m256d gdw = _mm256_mul_pd(_mm256_mul_pd(vb, vy), _mm256_loadu_pd(dw + i));
        const __m256d rhs = _mm256_add_pd(
            _mm256_add_pd(_mm256_add_pd(vy, dterm), gdw), _mm256_mul_pd(h, dn_eff));
        _mm256_storeu_pd(out + i, _mm256_div_pd(rhs, vdenom));
    }
    if (i < n) {
        // Remainder lanes go through the scalar reference, which computes the
        // identical sequence.
        linear_scheme_step_scalar(p, y + i, dw + i, dn + i, out + i, n - i);
    }
}

}  // namespace jsde

#endif  // x86-64
