// AVX2/FMA variant of the batched WFPT log-density kernel: four trials per
// iteration. Same series, recurrences and truncation rule as the scalar
// variant; lanes needing fewer terms than the widest lane have the extra
// terms masked to zero, so the truncation matches lane by lane.
//
// This translation unit is compiled with -mavx2 -mfma and must only be
// entered after a runtime CPU check (see dispatch.cpp).

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "kernel_common.hpp"

namespace rlhmmddm::simd {

namespace {

using detail::kHalfLog2Pi;
using detail::kLogPi;
using detail::kPi;

inline __m256d set1(double x) { return _mm256_set1_pd(x); }

// exp(x) for x <= 709; returns 0 below -708.39 instead of a subnormal.
// Cephes rational approximation on [-ln2/2, ln2/2].
inline __m256d exp_pd(__m256d x) {
    const __m256d lo = set1(-708.3964185322641);
    const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
    x = _mm256_min_pd(_mm256_max_pd(x, lo), set1(709.0));

    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, set1(1.4426950408889634)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, set1(6.93145751953125E-1), x);
    r = _mm256_fnmadd_pd(n, set1(1.42860682030941723212E-6), r);
    const __m256d rr = _mm256_mul_pd(r, r);

    __m256d px = _mm256_fmadd_pd(set1(1.26177193074810590878E-4), rr, set1(3.02994407707441961300E-2));
    px = _mm256_fmadd_pd(px, rr, set1(9.99999999999999999910E-1));
    px = _mm256_mul_pd(px, r);
    __m256d qx = _mm256_fmadd_pd(set1(3.00198505138664455042E-6), rr, set1(2.52448340349684104192E-3));
    qx = _mm256_fmadd_pd(qx, rr, set1(2.27265548208155028766E-1));
    qx = _mm256_fmadd_pd(qx, rr, set1(2.00000000000000000009E0));
    __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
    e = _mm256_fmadd_pd(set1(2.0), e, set1(1.0));

    // 2^n from the biased exponent n + 1023 placed in bits 52..62.
    const __m256d biased = _mm256_add_pd(n, set1(4503599627370496.0 + 1023.0));
    const __m256i bits = _mm256_slli_epi64(_mm256_castpd_si256(biased), 52);
    e = _mm256_mul_pd(e, _mm256_castsi256_pd(bits));
    return _mm256_andnot_pd(underflow, e);
}

// log(x) for positive normal x (fdlibm e_log polynomial).
inline __m256d log_pd(__m256d x) {
    const __m256i bits = _mm256_castpd_si256(x);
    const __m256i exp_field = _mm256_srli_epi64(bits, 52);
    const __m256d two52 = set1(4503599627370496.0);
    __m256d e = _mm256_sub_pd(
        _mm256_castsi256_pd(_mm256_or_si256(exp_field, _mm256_castpd_si256(two52))), two52);
    e = _mm256_sub_pd(e, set1(1023.0));

    const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
    const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
    __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));
    const __m256d big = _mm256_cmp_pd(m, set1(1.4142135623730951), _CMP_GT_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(m, set1(0.5)), big);
    e = _mm256_add_pd(e, _mm256_and_pd(big, set1(1.0)));

    const __m256d f = _mm256_sub_pd(m, set1(1.0));
    const __m256d s = _mm256_div_pd(f, _mm256_add_pd(set1(2.0), f));
    const __m256d z = _mm256_mul_pd(s, s);
    const __m256d w = _mm256_mul_pd(z, z);
    __m256d t1 = _mm256_fmadd_pd(w, set1(1.531383769920937332e-01), set1(2.222219843214978396e-01));
    t1 = _mm256_fmadd_pd(w, t1, set1(3.999999999940941908e-01));
    t1 = _mm256_mul_pd(w, t1);
    __m256d t2 = _mm256_fmadd_pd(w, set1(1.479819860511658591e-01), set1(1.818357216161805012e-01));
    t2 = _mm256_fmadd_pd(w, t2, set1(2.857142874366239149e-01));
    t2 = _mm256_fmadd_pd(w, t2, set1(6.666666666666735130e-01));
    t2 = _mm256_mul_pd(z, t2);
    const __m256d r = _mm256_add_pd(t2, t1);
    const __m256d hfsq = _mm256_mul_pd(set1(0.5), _mm256_mul_pd(f, f));

    // e*ln2_hi - ((hfsq - (s*(hfsq+R) + e*ln2_lo)) - f)
    const __m256d inner = _mm256_fmadd_pd(s, _mm256_add_pd(hfsq, r),
                                          _mm256_mul_pd(e, set1(1.90821492927058770002e-10)));
    const __m256d res = _mm256_sub_pd(_mm256_sub_pd(hfsq, inner), f);
    return _mm256_fmsub_pd(e, set1(6.93147180369123816490e-01), res);
}

inline double hmax(__m256d v) {
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, v);
    return std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
}

struct Block {
    __m256d value, g_alpha, g_b, g_v, g_tau;
};

Block compute_block(const WfptShared& p, const detail::TrigTables& trig, __m256d t,
                    __m256d upper, __m256d drift) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = set1(1.0);
    const __m256d alpha = set1(p.alpha);
    const __m256d inv_a2 = set1(1.0 / (p.alpha * p.alpha));
    const __m256d floor_v = set1(wfpt::kLogDensityFloor);

    const __m256d td_raw = _mm256_sub_pd(t, set1(p.tau));
    const __m256d valid = _mm256_cmp_pd(td_raw, zero, _CMP_GT_OQ);
    const __m256d td = _mm256_blendv_pd(one, td_raw, valid);
    const __m256d w = _mm256_blendv_pd(set1(p.b), set1(1.0 - p.b), upper);
    const __m256d v = _mm256_blendv_pd(drift, _mm256_sub_pd(zero, drift), upper);
    const __m256d u = _mm256_mul_pd(td, inv_a2);
    const __m256d inv_u = _mm256_div_pd(one, u);
    const __m256d log_u = log_pd(u);
    const __m256d sqrt_u = _mm256_sqrt_pd(u);

    // Term counts.
    const double eps = wfpt::kSeriesEpsilon;
    const __m256d log_c1 = _mm256_add_pd(set1(std::log(kPi * eps)), log_u);
    const __m256d kl_main = _mm256_sqrt_pd(_mm256_max_pd(
        _mm256_mul_pd(set1(-2.0 / (kPi * kPi)), _mm256_mul_pd(log_c1, inv_u)), zero));
    const __m256d kl = _mm256_max_pd(kl_main, _mm256_div_pd(one, _mm256_mul_pd(set1(kPi), sqrt_u)));
    const __m256d log_c2 =
        _mm256_fmadd_pd(set1(0.5), log_u, set1(std::log(2.0 * std::sqrt(2.0 * kPi) * eps)));
    const __m256d ks_main = _mm256_max_pd(
        _mm256_add_pd(set1(2.0), _mm256_sqrt_pd(_mm256_max_pd(
                                     _mm256_mul_pd(set1(-2.0), _mm256_mul_pd(u, log_c2)), zero))),
        _mm256_add_pd(sqrt_u, one));
    const __m256d ks = _mm256_blendv_pd(set1(2.0), ks_main, _mm256_cmp_pd(log_c2, zero, _CMP_LT_OQ));
    const __m256d n_small = _mm256_round_pd(ks, _MM_FROUND_TO_POS_INF | _MM_FROUND_NO_EXC);
    const __m256d n_large = _mm256_min_pd(
        _mm256_max_pd(_mm256_round_pd(kl, _MM_FROUND_TO_POS_INF | _MM_FROUND_NO_EXC), one),
        set1(static_cast<double>(detail::kMaxLargeTerms)));
    const __m256d use_small = _mm256_and_pd(_mm256_cmp_pd(n_small, n_large, _CMP_LT_OQ), valid);
    const __m256d use_large = _mm256_andnot_pd(use_small, valid);
    const int small_bits = _mm256_movemask_pd(use_small);
    const int large_bits = _mm256_movemask_pd(use_large);

    __m256d sum = one, s_u = zero, s_w = zero, base = zero;

    if (small_bits) {
        // last = floor(K/2) positive indices, first = floor((K-1)/2) negative ones.
        const __m256d last = _mm256_floor_pd(_mm256_mul_pd(n_small, set1(0.5)));
        const __m256d first = _mm256_floor_pd(_mm256_mul_pd(_mm256_sub_pd(n_small, one), set1(0.5)));
        const int k_last = static_cast<int>(hmax(_mm256_and_pd(last, use_small)));
        const int k_first = static_cast<int>(hmax(_mm256_and_pd(first, use_small)));

        const __m256d m2u = _mm256_mul_pd(set1(-2.0), inv_u);
        const __m256d a = exp_pd(m2u);
        const __m256d a2 = _mm256_mul_pd(a, a);
        const __m256d bw = exp_pd(_mm256_mul_pd(m2u, w));
        const __m256d cw = exp_pd(_mm256_mul_pd(m2u, _mm256_sub_pd(one, w)));

        __m256d s = w;
        __m256d su = _mm256_mul_pd(_mm256_mul_pd(w, w), w);
        __m256d sw = _mm256_fnmadd_pd(_mm256_mul_pd(w, w), inv_u, one);
        __m256d e = one, pk = a;
        for (int k = 1; k <= k_last; ++k) {
            e = _mm256_mul_pd(e, _mm256_mul_pd(pk, bw));
            pk = _mm256_mul_pd(pk, a2);
            const __m256d active = _mm256_cmp_pd(set1(k), last, _CMP_LE_OQ);
            const __m256d x = _mm256_add_pd(w, set1(2.0 * k));
            const __m256d te = _mm256_and_pd(e, active);
            const __m256d xte = _mm256_mul_pd(x, te);
            s = _mm256_add_pd(s, xte);
            su = _mm256_fmadd_pd(_mm256_mul_pd(x, x), xte, su);
            sw = _mm256_add_pd(sw, _mm256_mul_pd(_mm256_fnmadd_pd(_mm256_mul_pd(x, x), inv_u, one), te));
        }
        e = one;
        __m256d rk = one;
        for (int m = 1; m <= k_first; ++m) {
            e = _mm256_mul_pd(e, _mm256_mul_pd(rk, cw));
            rk = _mm256_mul_pd(rk, a2);
            const __m256d active = _mm256_cmp_pd(set1(m), first, _CMP_LE_OQ);
            const __m256d x = _mm256_sub_pd(w, set1(2.0 * m));
            const __m256d te = _mm256_and_pd(e, active);
            const __m256d xte = _mm256_mul_pd(x, te);
            s = _mm256_add_pd(s, xte);
            su = _mm256_fmadd_pd(_mm256_mul_pd(x, x), xte, su);
            sw = _mm256_add_pd(sw, _mm256_mul_pd(_mm256_fnmadd_pd(_mm256_mul_pd(x, x), inv_u, one), te));
        }
        // -0.5 log(2 pi) - 1.5 log u - w^2 / 2u
        const __m256d b_small = _mm256_sub_pd(
            _mm256_fnmadd_pd(set1(1.5), log_u, set1(-kHalfLog2Pi)),
            _mm256_mul_pd(_mm256_mul_pd(w, w), _mm256_mul_pd(set1(0.5), inv_u)));
        const __m256d du_small =
            _mm256_fmadd_pd(set1(-1.5), inv_u, _mm256_mul_pd(_mm256_mul_pd(set1(0.5), su),
                                                             _mm256_mul_pd(inv_u, inv_u)));
        sum = _mm256_blendv_pd(sum, s, use_small);
        s_u = _mm256_blendv_pd(s_u, du_small, use_small);  // numerator part, divided by s below
        s_w = _mm256_blendv_pd(s_w, sw, use_small);
        base = _mm256_blendv_pd(base, b_small, use_small);
    }

    if (large_bits) {
        const int k_max = static_cast<int>(hmax(_mm256_and_pd(n_large, use_large)));
        const __m256d half_pi2_u = _mm256_mul_pd(set1(kPi * kPi / 2.0), u);
        const __m256d q = exp_pd(_mm256_sub_pd(zero, half_pi2_u));
        const __m256d q2 = _mm256_mul_pd(q, q);
        __m256d e = one, m = _mm256_mul_pd(q2, q);
        __m256d s = zero, su = zero, sw = zero;
        for (int k = 1; k <= k_max; ++k) {
            const __m256d active = _mm256_cmp_pd(set1(k), n_large, _CMP_LE_OQ);
            const __m256d sin_k = _mm256_blendv_pd(set1(trig.sin[0][k - 1]), set1(trig.sin[1][k - 1]), upper);
            const __m256d cos_k = _mm256_blendv_pd(set1(trig.cos[0][k - 1]), set1(trig.cos[1][k - 1]), upper);
            const __m256d kk = set1(static_cast<double>(k));
            const __m256d ke = _mm256_and_pd(_mm256_mul_pd(kk, e), active);
            s = _mm256_fmadd_pd(ke, sin_k, s);
            su = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_mul_pd(kk, kk), ke), sin_k, su);
            sw = _mm256_fmadd_pd(_mm256_mul_pd(kk, ke), cos_k, sw);
            e = _mm256_mul_pd(e, m);
            m = _mm256_mul_pd(m, q2);
        }
        const __m256d b_large = _mm256_sub_pd(set1(kLogPi), half_pi2_u);
        sum = _mm256_blendv_pd(sum, s, use_large);
        s_u = _mm256_blendv_pd(s_u, _mm256_mul_pd(set1(-kPi * kPi / 2.0), su), use_large);
        s_w = _mm256_blendv_pd(s_w, _mm256_mul_pd(set1(kPi), sw), use_large);
        base = _mm256_blendv_pd(base, b_large, use_large);
    }

    const __m256d positive = _mm256_and_pd(_mm256_cmp_pd(sum, zero, _CMP_GT_OQ), valid);
    const __m256d safe_sum = _mm256_blendv_pd(one, sum, positive);
    const __m256d inv_sum = _mm256_div_pd(one, safe_sum);
    const __m256d unit = _mm256_add_pd(base, log_pd(safe_sum));

    // Small-time d/du = -1.5/u + (s_u_raw / (2u^2)) / s; du_small above folded
    // the -1.5/u in before the division, so split it back out.
    const __m256d du_small_fixed = _mm256_fmadd_pd(
        _mm256_fmadd_pd(set1(1.5), inv_u, s_u), inv_sum, _mm256_mul_pd(set1(-1.5), inv_u));
    const __m256d d_u = _mm256_blendv_pd(_mm256_mul_pd(s_u, inv_sum), du_small_fixed, use_small);
    const __m256d d_w = _mm256_mul_pd(s_w, inv_sum);

    const __m256d vv_td = _mm256_mul_pd(_mm256_mul_pd(v, v), td);
    __m256d lf = _mm256_sub_pd(set1(-2.0 * std::log(p.alpha)), _mm256_mul_pd(alpha, _mm256_mul_pd(w, v)));
    lf = _mm256_fnmadd_pd(set1(0.5), vv_td, lf);
    lf = _mm256_add_pd(lf, unit);
    const __m256d keep = _mm256_and_pd(positive, _mm256_cmp_pd(lf, floor_v, _CMP_GT_OQ));

    Block out;
    out.value = _mm256_blendv_pd(floor_v, lf, keep);
    const __m256d g_alpha = _mm256_sub_pd(
        _mm256_sub_pd(set1(-2.0 / p.alpha), _mm256_mul_pd(w, v)),
        _mm256_mul_pd(_mm256_mul_pd(set1(2.0 / p.alpha), u), d_u));
    const __m256d g_w = _mm256_fnmadd_pd(alpha, v, d_w);
    const __m256d g_v = _mm256_sub_pd(_mm256_mul_pd(set1(-p.alpha), w), _mm256_mul_pd(v, td));
    const __m256d g_td = _mm256_fmadd_pd(d_u, inv_a2, _mm256_mul_pd(set1(-0.5), _mm256_mul_pd(v, v)));
    out.g_alpha = _mm256_and_pd(g_alpha, keep);
    out.g_b = _mm256_and_pd(_mm256_blendv_pd(g_w, _mm256_sub_pd(zero, g_w), upper), keep);
    out.g_v = _mm256_and_pd(_mm256_blendv_pd(g_v, _mm256_sub_pd(zero, g_v), upper), keep);
    out.g_tau = _mm256_and_pd(_mm256_sub_pd(zero, g_td), keep);
    return out;
}

inline __m256d load_choice_mask(const std::uint8_t* c) {
    std::int32_t packed;
    std::memcpy(&packed, c, sizeof(packed));
    const __m256i wide = _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(packed));
    return _mm256_castsi256_pd(_mm256_cmpgt_epi64(wide, _mm256_setzero_si256()));
}

}  // namespace

void wfpt_log_density_avx2(const WfptShared& p, std::span<const double> rt,
                           std::span<const std::uint8_t> choice, std::span<const double> drift,
                           std::span<double> out, const WfptGradient* grad) {
    detail::check_batch(p, rt, choice, drift, out, grad);
    const detail::TrigTables trig(p.b);
    const std::size_t n = rt.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const Block blk = compute_block(p, trig, _mm256_loadu_pd(rt.data() + i),
                                        load_choice_mask(choice.data() + i),
                                        _mm256_loadu_pd(drift.data() + i));
        _mm256_storeu_pd(out.data() + i, blk.value);
        if (grad) {
            _mm256_storeu_pd(grad->d_alpha.data() + i, blk.g_alpha);
            _mm256_storeu_pd(grad->d_b.data() + i, blk.g_b);
            _mm256_storeu_pd(grad->d_v.data() + i, blk.g_v);
            _mm256_storeu_pd(grad->d_tau.data() + i, blk.g_tau);
        }
    }
    if (i == n) return;

    // Tail: pad to a full vector with a harmless valid trial.
    alignas(32) double t4[4], d4[4], o[5][4];
    alignas(4) std::uint8_t c4[4] = {0, 0, 0, 0};
    const std::size_t rem = n - i;
    for (std::size_t k = 0; k < 4; ++k) {
        t4[k] = k < rem ? rt[i + k] : p.tau + 1.0;
        d4[k] = k < rem ? drift[i + k] : 0.0;
        c4[k] = k < rem ? choice[i + k] : 0;
    }
    const Block blk = compute_block(p, trig, _mm256_load_pd(t4), load_choice_mask(c4), _mm256_load_pd(d4));
    _mm256_store_pd(o[0], blk.value);
    _mm256_store_pd(o[1], blk.g_alpha);
    _mm256_store_pd(o[2], blk.g_b);
    _mm256_store_pd(o[3], blk.g_v);
    _mm256_store_pd(o[4], blk.g_tau);
    for (std::size_t k = 0; k < rem; ++k) {
        out[i + k] = o[0][k];
        if (grad) {
            grad->d_alpha[i + k] = o[1][k];
            grad->d_b[i + k] = o[2][k];
            grad->d_v[i + k] = o[3][k];
            grad->d_tau[i + k] = o[4][k];
        }
    }
}

}  // namespace rlhmmddm::simd
