// Reached only through the runtime dispatcher. AVX2 code generation is
// enabled per function rather than per file so that inline library code
// instantiated here stays baseline x86-64.

#include <immintrin.h>

#include <cstddef>
#include <cstdint>
#include <limits>

#include "tccopula/simd/detail/constants.hpp"
#include "tccopula/simd/kernels.hpp"

#define TCC_AVX2 __attribute__((target("avx2")))

namespace tccopula::simd::avx2 {

namespace {

namespace c = detail;

TCC_AVX2 inline __m256d set1(double v) { return _mm256_set1_pd(v); }

TCC_AVX2 inline __m256d vabs(__m256d v) { return _mm256_andnot_pd(set1(-0.0), v); }

TCC_AVX2 inline __m256d vexp(__m256d x) {
  const __m256d under = _mm256_cmp_pd(x, set1(c::kExpUnderflow), _CMP_LT_OQ);
  const __m256d over = _mm256_cmp_pd(x, set1(709.0), _CMP_GT_OQ);

  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, set1(c::kLog2e)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d hi = _mm256_sub_pd(x, _mm256_mul_pd(k, set1(c::kLn2Hi)));
  const __m256d r = _mm256_sub_pd(hi, _mm256_mul_pd(k, set1(c::kLn2Lo)));

  __m256d p = set1(c::kExpTaylor[c::kExpDegree]);
  for (int i = c::kExpDegree - 1; i >= 0; --i)
    p = _mm256_add_pd(_mm256_mul_pd(p, r), set1(c::kExpTaylor[i]));

  // k is integral and small, so adding 1.5*2^52 leaves it in the low mantissa bits.
  const __m256d magic = set1(6755399441055744.0);
  const __m256i ki = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(k, magic)),
                                      _mm256_castpd_si256(magic));
  const __m256d scale =
      _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_add_epi64(ki, _mm256_set1_epi64x(1023)), 52));

  __m256d res = _mm256_mul_pd(p, scale);
  res = _mm256_blendv_pd(res, _mm256_setzero_pd(), under);
  res = _mm256_blendv_pd(res, set1(std::numeric_limits<double>::infinity()), over);
  return res;
}

TCC_AVX2 inline __m256d erf_central(__m256d y, __m256d negative) {
  const __m256d half_one = set1(0.5);
  const __m256d ysq = _mm256_mul_pd(y, y);
  __m256d xnum = _mm256_mul_pd(set1(c::kErfA[4]), ysq);
  __m256d xden = ysq;
  for (int i = 0; i < 3; ++i) {
    xnum = _mm256_mul_pd(_mm256_add_pd(xnum, set1(c::kErfA[i])), ysq);
    xden = _mm256_mul_pd(_mm256_add_pd(xden, set1(c::kErfB[i])), ysq);
  }
  const __m256d erf = _mm256_div_pd(_mm256_mul_pd(y, _mm256_add_pd(xnum, set1(c::kErfA[3]))),
                                    _mm256_add_pd(xden, set1(c::kErfB[3])));
  const __m256d half = _mm256_mul_pd(half_one, erf);
  return _mm256_blendv_pd(_mm256_add_pd(half_one, half), _mm256_sub_pd(half_one, half), negative);
}

TCC_AVX2 inline __m256d erfc_mid(__m256d y) {
  __m256d xnum = _mm256_mul_pd(set1(c::kErfcC[8]), y);
  __m256d xden = y;
  for (int i = 0; i < 7; ++i) {
    xnum = _mm256_mul_pd(_mm256_add_pd(xnum, set1(c::kErfcC[i])), y);
    xden = _mm256_mul_pd(_mm256_add_pd(xden, set1(c::kErfcD[i])), y);
  }
  return _mm256_div_pd(_mm256_add_pd(xnum, set1(c::kErfcC[7])), _mm256_add_pd(xden, set1(c::kErfcD[7])));
}

TCC_AVX2 inline __m256d erfc_tail(__m256d y) {
  const __m256d ysq = _mm256_div_pd(set1(1.0), _mm256_mul_pd(y, y));
  __m256d xnum = _mm256_mul_pd(set1(c::kErfcP[5]), ysq);
  __m256d xden = ysq;
  for (int i = 0; i < 4; ++i) {
    xnum = _mm256_mul_pd(_mm256_add_pd(xnum, set1(c::kErfcP[i])), ysq);
    xden = _mm256_mul_pd(_mm256_add_pd(xden, set1(c::kErfcQ[i])), ysq);
  }
  const __m256d r = _mm256_div_pd(_mm256_mul_pd(ysq, _mm256_add_pd(xnum, set1(c::kErfcP[4]))),
                                  _mm256_add_pd(xden, set1(c::kErfcQ[4])));
  return _mm256_div_pd(_mm256_sub_pd(set1(c::kInvSqrtPi), r), y);
}

// Each lane gets exactly the scalar branch result; branches no lane needs are skipped.
TCC_AVX2 inline __m256d vnormal_cdf(__m256d u, const double* square_table) {
  const __m256d y = _mm256_mul_pd(vabs(u), set1(c::kInvSqrt2));
  const __m256d negative = _mm256_cmp_pd(u, _mm256_setzero_pd(), _CMP_LT_OQ);
  const __m256d use_central = _mm256_cmp_pd(y, set1(c::kErfSmall), _CMP_LE_OQ);
  const int central_lanes = _mm256_movemask_pd(use_central);
  if (central_lanes == 0xF) return erf_central(y, negative);
  const __m256d big = _mm256_cmp_pd(y, set1(c::kErfcBig), _CMP_GE_OQ);
  if (_mm256_movemask_pd(big) == 0xF) return _mm256_blendv_pd(set1(1.0), _mm256_setzero_pd(), negative);

  const __m256d use_mid = _mm256_cmp_pd(y, set1(c::kErfcMid), _CMP_LE_OQ);
  const int mid_lanes = _mm256_movemask_pd(use_mid);
  __m256d r;
  if (mid_lanes == 0xF)
    r = erfc_mid(y);
  else if (mid_lanes == 0)
    r = erfc_tail(y);
  else
    r = _mm256_blendv_pd(erfc_tail(y), erfc_mid(y), use_mid);

  const __m256d ky = _mm256_round_pd(_mm256_mul_pd(y, set1(16.0)), _MM_FROUND_TO_ZERO | _MM_FROUND_NO_EXC);
  const __m256d t = _mm256_mul_pd(ky, set1(0.0625));
  const __m256d del = _mm256_mul_pd(_mm256_sub_pd(y, t), _mm256_add_pd(y, t));
  const __m256d neg_del = _mm256_xor_pd(del, set1(-0.0));
  // min_pd returns the second operand for NaN lanes, keeping the index in range
  const __m128i idx = _mm256_cvttpd_epi32(_mm256_min_pd(ky, set1(c::kSquareTableLast)));
  const __m256d e_tt = _mm256_i32gather_pd(square_table, idx, 8);
  __m256d erfc_y = _mm256_mul_pd(_mm256_mul_pd(e_tt, vexp(neg_del)), r);
  erfc_y = _mm256_blendv_pd(erfc_y, _mm256_setzero_pd(), big);

  const __m256d half = _mm256_mul_pd(set1(0.5), erfc_y);
  const __m256d tail = _mm256_blendv_pd(_mm256_sub_pd(set1(1.0), half), half, negative);
  if (central_lanes == 0) return tail;
  return _mm256_blendv_pd(tail, erf_central(y, negative), use_central);
}

}  // namespace

TCC_AVX2 void normal_cdf(std::span<const double> x, std::span<double> out) noexcept {
  const std::size_t n = x.size();
  const double* table = c::exp_neg_square_table();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d a = vnormal_cdf(_mm256_loadu_pd(x.data() + i), table);
    const __m256d b = vnormal_cdf(_mm256_loadu_pd(x.data() + i + 4), table);
    _mm256_storeu_pd(out.data() + i, a);
    _mm256_storeu_pd(out.data() + i + 4, b);
  }
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out.data() + i, vnormal_cdf(_mm256_loadu_pd(x.data() + i), table));
  if (i < n) {
    alignas(32) double in[4] = {0.0, 0.0, 0.0, 0.0};
    alignas(32) double res[4];
    for (std::size_t j = i; j < n; ++j) in[j - i] = x[j];
    _mm256_store_pd(res, vnormal_cdf(_mm256_load_pd(in), table));
    for (std::size_t j = i; j < n; ++j) out[j] = res[j - i];
  }
}

TCC_AVX2 void increment_powers(std::span<const double> values, std::span<double> squares,
                      std::span<double> fourths) noexcept {
  if (values.size() < 2) return;
  const std::size_t n = values.size() - 1;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(values.data() + i + 1),
                                    _mm256_loadu_pd(values.data() + i));
    const __m256d sq = _mm256_mul_pd(d, d);
    _mm256_storeu_pd(squares.data() + i, sq);
    _mm256_storeu_pd(fourths.data() + i, _mm256_mul_pd(sq, sq));
  }
  for (; i < n; ++i) {
    // Elementwise subtract and multiply round identically in any lane width.
    const __m128d d = _mm_sub_sd(_mm_load_sd(values.data() + i + 1), _mm_load_sd(values.data() + i));
    const __m128d sq = _mm_mul_sd(d, d);
    _mm_store_sd(squares.data() + i, sq);
    _mm_store_sd(fourths.data() + i, _mm_mul_sd(sq, sq));
  }
}

TCC_AVX2 double max_abs_diff(std::span<const double> a, std::span<const double> b) noexcept {
  const std::size_t n = a.size();
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    m = _mm256_max_pd(m, vabs(_mm256_sub_pd(_mm256_loadu_pd(a.data() + i),
                                            _mm256_loadu_pd(b.data() + i))));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double best = lanes[0];
  for (int k = 1; k < 4; ++k) best = lanes[k] > best ? lanes[k] : best;
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    const double ad = d < 0.0 ? -d : d;
    best = ad > best ? ad : best;
  }
  return best;
}

}  // namespace tccopula::simd::avx2
