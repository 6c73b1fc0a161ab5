// AVX2 variants of the hot kernels. This translation unit is compiled with
// -mavx2 only; callers reach it through the runtime dispatcher. The lane
// arithmetic mirrors the scalar formulas operation-for-operation (and FP
// contraction is disabled project-wide), so results are bit-identical to the
// scalar kernels.
#include <immintrin.h>

#include "cenobreak/kernels_detail.hpp"
#include "kernels_tables.hpp"

namespace cenobreak::kernels {
namespace {

struct LaneState {
  __m256d best_val;
  __m256d best_idx;
};

inline void update(LaneState& st, __m256d val, __m256d idx) {
  const __m256d lt = _mm256_cmp_pd(val, st.best_val, _CMP_LT_OQ);
  st.best_val = _mm256_blendv_pd(st.best_val, val, lt);
  st.best_idx = _mm256_blendv_pd(st.best_idx, idx, lt);
}

inline void merge_scalar(MinLoc& best, double val, std::int64_t e) {
  if (val < best.val || (val == best.val && e < best.idx)) best = {val, e};
}

inline MinLoc reduce(const LaneState& st, const MinLoc& tail_best) {
  alignas(32) double vals[4], idxs[4];
  _mm256_store_pd(vals, st.best_val);
  _mm256_store_pd(idxs, st.best_idx);
  MinLoc best = tail_best;
  for (int lane = 0; lane < 4; ++lane) {
    if (idxs[lane] < 0) continue;  // lane never updated
    merge_scalar(best, vals[lane], static_cast<std::int64_t>(idxs[lane]));
  }
  return best;
}

MinLoc relax_q1_avx2(const double* prev, Q1View pf, std::int64_t i,
                     std::int64_t e_lo, std::int64_t e_hi) {
  MinLoc best{std::numeric_limits<double>::infinity(), -1};
  std::int64_t e = e_lo;
  const std::int64_t count = e_hi - e_lo + 1;
  if (count >= 4) {
    const __m256d syi = _mm256_set1_pd(pf.sy[i]);
    const __m256d syyi = _mm256_set1_pd(pf.syy[i]);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d four = _mm256_set1_pd(4.0);
    const double n0 = static_cast<double>(e_lo - i + 1);
    __m256d vn = _mm256_setr_pd(n0, n0 + 1.0, n0 + 2.0, n0 + 3.0);
    const double d0 = static_cast<double>(e_lo);
    __m256d vidx = _mm256_setr_pd(d0, d0 + 1.0, d0 + 2.0, d0 + 3.0);
    LaneState st{_mm256_set1_pd(std::numeric_limits<double>::infinity()),
                 _mm256_set1_pd(-1.0)};
    for (; e + 3 <= e_hi; e += 4) {
      const __m256d sy = _mm256_loadu_pd(pf.sy + e + 1);
      const __m256d syy = _mm256_loadu_pd(pf.syy + e + 1);
      const __m256d pv = _mm256_loadu_pd(prev + e + 1);
      const __m256d dy = _mm256_sub_pd(sy, syi);
      const __m256d dyy = _mm256_sub_pd(syy, syyi);
      const __m256d t = _mm256_mul_pd(dy, dy);
      const __m256d u = _mm256_div_pd(t, vn);
      const __m256d ssr = _mm256_sub_pd(dyy, u);
      const __m256d cost = _mm256_max_pd(ssr, zero);
      const __m256d val = _mm256_add_pd(pv, cost);
      update(st, val, vidx);
      vn = _mm256_add_pd(vn, four);
      vidx = _mm256_add_pd(vidx, four);
    }
    best = reduce(st, best);
  }
  for (; e <= e_hi; ++e) {
    merge_scalar(best, prev[e + 1] + q1_cost(pf, i, e), e);
  }
  return best;
}

MinLoc relax_q2_avx2(const double* prev, Q2View pf, std::int64_t i,
                     std::int64_t e_lo, std::int64_t e_hi) {
  MinLoc best{std::numeric_limits<double>::infinity(), -1};
  std::int64_t e = e_lo;
  const std::int64_t count = e_hi - e_lo + 1;
  if (count >= 4) {
    const __m256d syi = _mm256_set1_pd(pf.sy[i]);
    const __m256d syyi = _mm256_set1_pd(pf.syy[i]);
    const __m256d swi = _mm256_set1_pd(pf.sw[i]);
    const __m256d swwi = _mm256_set1_pd(pf.sww[i]);
    const __m256d swyi = _mm256_set1_pd(pf.swy[i]);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d four = _mm256_set1_pd(4.0);
    const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    const __m256d cond_bound = _mm256_set1_pd(4.0e12);
    const double n0 = static_cast<double>(e_lo - i + 1);
    __m256d vn = _mm256_setr_pd(n0, n0 + 1.0, n0 + 2.0, n0 + 3.0);
    const double d0 = static_cast<double>(e_lo);
    __m256d vidx = _mm256_setr_pd(d0, d0 + 1.0, d0 + 2.0, d0 + 3.0);
    LaneState st{inf, _mm256_set1_pd(-1.0)};
    for (; e + 3 <= e_hi; e += 4) {
      const __m256d sy = _mm256_sub_pd(_mm256_loadu_pd(pf.sy + e + 1), syi);
      const __m256d syy = _mm256_sub_pd(_mm256_loadu_pd(pf.syy + e + 1), syyi);
      const __m256d sw = _mm256_sub_pd(_mm256_loadu_pd(pf.sw + e + 1), swi);
      const __m256d sww = _mm256_sub_pd(_mm256_loadu_pd(pf.sww + e + 1), swwi);
      const __m256d swy = _mm256_sub_pd(_mm256_loadu_pd(pf.swy + e + 1), swyi);
      const __m256d pv = _mm256_loadu_pd(prev + e + 1);

      const __m256d det = _mm256_sub_pd(_mm256_mul_pd(vn, sww), _mm256_mul_pd(sw, sw));
      // Degeneracy: det <= 0 or (tr + disc)^2 > 4e12 * det.
      const __m256d tr = _mm256_add_pd(vn, sww);
      const __m256d disc_sq =
          _mm256_sub_pd(_mm256_mul_pd(tr, tr), _mm256_mul_pd(four, det));
      const __m256d disc = _mm256_sqrt_pd(_mm256_max_pd(disc_sq, zero));
      const __m256d top = _mm256_add_pd(tr, disc);
      const __m256d detpos = _mm256_cmp_pd(det, zero, _CMP_GT_OQ);
      const __m256d illcond = _mm256_cmp_pd(_mm256_mul_pd(top, top),
                                            _mm256_mul_pd(cond_bound, det), _CMP_GT_OQ);
      const __m256d degen = _mm256_or_pd(_mm256_andnot_pd(detpos, _mm256_castsi256_pd(
                                             _mm256_set1_epi64x(-1))),
                                         illcond);
      const __m256d det_safe = _mm256_blendv_pd(det, one, degen);
      const __m256d b0 = _mm256_div_pd(
          _mm256_sub_pd(_mm256_mul_pd(sww, sy), _mm256_mul_pd(sw, swy)), det_safe);
      const __m256d b1 = _mm256_div_pd(
          _mm256_sub_pd(_mm256_mul_pd(vn, swy), _mm256_mul_pd(sw, sy)), det_safe);
      const __m256d fit =
          _mm256_sub_pd(_mm256_sub_pd(syy, _mm256_mul_pd(b0, sy)), _mm256_mul_pd(b1, swy));
      const __m256d clamped = _mm256_max_pd(fit, zero);
      const __m256d cost = _mm256_blendv_pd(clamped, inf, degen);
      const __m256d val = _mm256_add_pd(pv, cost);
      update(st, val, vidx);
      vn = _mm256_add_pd(vn, four);
      vidx = _mm256_add_pd(vidx, four);
    }
    best = reduce(st, best);
  }
  for (; e <= e_hi; ++e) {
    merge_scalar(best, prev[e + 1] + q2_cost(pf, i, e), e);
  }
  return best;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double out = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) out += a[i] * b[i];
  return out;
}

}  // namespace

const KernelTable kAvx2Kernels{relax_q1_avx2, relax_q2_avx2, dot_avx2, "avx2"};

}  // namespace cenobreak::kernels
