/* dcgrid - DC microgrid simulation engine
 * Copyright (c) 2026 The dcgrid Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "dcgrid/kernels.hpp"

#include "dcgrid/errors.hpp"

#if defined(DCGRID_HAVE_AVX2_KERNEL)

#include <immintrin.h>

#include <array>
#include <string>

#ifndef __AVX2__
#error pv_batch_avx2.cpp must be compiled with -mavx2 -mfma
#endif

namespace dcgrid::kernels::avx2 {

namespace {

// Cephes-style exp: range reduction by ln2, Pade approximant on the
// remainder, exponent reassembled with integer ops. Inputs are clamped to the
// finite range, so overflow saturates near DBL_MAX instead of producing inf.
inline __m256d exp_pd(__m256d x)
{
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
    const __m256d c1 = _mm256_set1_pd(6.93145751953125E-1);
    const __m256d c2 = _mm256_set1_pd(1.42860682030941723212E-6);

    x = _mm256_min_pd(x, _mm256_set1_pd(709.0));
    x = _mm256_max_pd(x, _mm256_set1_pd(-708.0));

    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    x = _mm256_fnmadd_pd(n, c1, x);
    x = _mm256_fnmadd_pd(n, c2, x);

    const __m256d xx = _mm256_mul_pd(x, x);
    __m256d p = _mm256_set1_pd(1.26177193074810590878E-4);
    p = _mm256_fmadd_pd(p, xx, _mm256_set1_pd(3.02994407707441961300E-2));
    p = _mm256_fmadd_pd(p, xx, _mm256_set1_pd(9.99999999999999999910E-1));
    p = _mm256_mul_pd(p, x);

    __m256d q = _mm256_set1_pd(3.00198505138664455042E-6);
    q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.52448340349684104192E-3));
    q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.27265548208155028766E-1));
    q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.00000000000000000009E0));

    const __m256d two = _mm256_set1_pd(2.0);
    __m256d r = _mm256_div_pd(p, _mm256_sub_pd(q, p));
    r = _mm256_fmadd_pd(two, r, _mm256_set1_pd(1.0));

    // 2^n: n + 1.5*2^52 puts n in the low mantissa bits
    const __m256d magic = _mm256_set1_pd(6755399441055744.0);
    __m256i bits = _mm256_castpd_si256(_mm256_add_pd(n, magic));
    bits = _mm256_sub_epi64(bits, _mm256_castpd_si256(magic));
    bits = _mm256_add_epi64(bits, _mm256_set1_epi64x(1023));
    bits = _mm256_slli_epi64(bits, 52);
    return _mm256_mul_pd(r, _mm256_castsi256_pd(bits));
}

inline __m256d abs_pd(__m256d x)
{
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
}

struct PanelRegs {
    __m256d i_ph;
    __m256d i_0;
    __m256d inv_nvt;
    __m256d r_s;
    __m256d inv_rsh;
    __m256d slope_exp;
    __m256d slope_const;
};

inline __m256d residual(const PanelRegs& p, __m256d v, __m256d i)
{
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d vd = _mm256_fmadd_pd(i, p.r_s, v);
    const __m256d diode = _mm256_mul_pd(p.i_0, _mm256_sub_pd(exp_pd(_mm256_mul_pd(vd, p.inv_nvt)), one));
    __m256d r = _mm256_sub_pd(p.i_ph, diode);
    r = _mm256_fnmadd_pd(vd, p.inv_rsh, r);
    return _mm256_sub_pd(r, i);
}

// Newton with per-lane backtracking; mirrors the scalar reference step rule.
__m256d solve4(const PanelRegs& p, __m256d v, bool& ok)
{
    const __m256d tol = _mm256_set1_pd(kPvTolerance);
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d lambda_min = _mm256_set1_pd(1e-10);

    __m256d i = p.i_ph;
    __m256d r = residual(p, v, i);
    __m256d active = _mm256_cmp_pd(abs_pd(r), tol, _CMP_GE_OQ);

    for (int it = 0; it < kPvMaxIterations && _mm256_movemask_pd(active); ++it) {
        const __m256d vd = _mm256_fmadd_pd(i, p.r_s, v);
        const __m256d df = _mm256_fmadd_pd(p.slope_exp, exp_pd(_mm256_mul_pd(vd, p.inv_nvt)), p.slope_const);
        const __m256d step = _mm256_div_pd(r, df); // negated below

        __m256d lambda = _mm256_set1_pd(1.0);
        __m256d i_new = _mm256_sub_pd(i, step);
        __m256d r_new = residual(p, v, i_new);
        for (;;) {
            // lanes still increasing the residual (NaN counts as increasing)
            __m256d worse = _mm256_cmp_pd(abs_pd(r_new), abs_pd(r), _CMP_NLE_UQ);
            worse = _mm256_and_pd(worse, _mm256_cmp_pd(lambda, lambda_min, _CMP_GE_OQ));
            worse = _mm256_and_pd(worse, active);
            if (!_mm256_movemask_pd(worse))
                break;
            lambda = _mm256_blendv_pd(lambda, _mm256_mul_pd(lambda, half), worse);
            const __m256d i_try = _mm256_fnmadd_pd(lambda, step, i);
            i_new = _mm256_blendv_pd(i_new, i_try, worse);
            r_new = _mm256_blendv_pd(r_new, residual(p, v, i_try), worse);
        }
        i = _mm256_blendv_pd(i, i_new, active);
        r = _mm256_blendv_pd(r, r_new, active);
        active = _mm256_cmp_pd(abs_pd(r), tol, _CMP_GE_OQ);
    }
    ok = _mm256_movemask_pd(_mm256_cmp_pd(abs_pd(r), tol, _CMP_LT_OQ)) == 0xF;
    return i;
}

} // namespace

void pv_current_batch(const PvPanel& panel, double g, std::span<const double> v, std::span<double> i)
{
    const PanelRegs p{
        _mm256_set1_pd(panel.i_ph_stc * (g / panel.g_stc)),
        _mm256_set1_pd(panel.i_0),
        _mm256_set1_pd(1.0 / panel.n_vt),
        _mm256_set1_pd(panel.r_s),
        _mm256_set1_pd(1.0 / panel.r_sh),
        _mm256_set1_pd(-panel.i_0 * panel.r_s / panel.n_vt),
        _mm256_set1_pd(-panel.r_s / panel.r_sh - 1.0),
    };

    const std::size_t n = v.size();
    std::size_t k = 0;
    bool ok = true;
    for (; k + 4 <= n; k += 4) {
        _mm256_storeu_pd(&i[k], solve4(p, _mm256_loadu_pd(&v[k]), ok));
        if (!ok)
            throw NoConvergence("pv_current_batch(avx2): Newton iteration did not converge near v=" +
                                std::to_string(v[k]) + " V");
    }
    if (k < n) {
        // tail: pad with the last voltage
        alignas(32) std::array<double, 4> vt{};
        alignas(32) std::array<double, 4> it{};
        for (std::size_t j = 0; j < 4; ++j)
            vt[j] = v[k + (k + j < n ? j : n - 1 - k)];
        _mm256_store_pd(it.data(), solve4(p, _mm256_load_pd(vt.data()), ok));
        if (!ok)
            throw NoConvergence("pv_current_batch(avx2): Newton iteration did not converge near v=" +
                                std::to_string(v[k]) + " V");
        for (std::size_t j = 0; k + j < n; ++j)
            i[k + j] = it[j];
    }
}

} // namespace dcgrid::kernels::avx2

#else

namespace dcgrid::kernels::avx2 {

void pv_current_batch(const PvPanel& panel, double g, std::span<const double> v, std::span<double> i)
{
    scalar::pv_current_batch(panel, g, v, i);
}

} // namespace dcgrid::kernels::avx2

#endif
