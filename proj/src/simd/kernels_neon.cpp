// AArch64 Advanced SIMD variants. NEON is part of the base AArch64 ISA, so
// no runtime feature check is needed once this file is built.

#include <arm_neon.h>

#include <cstddef>
#include <cstdint>
#include <limits>

#include "tccopula/simd/detail/constants.hpp"
#include "tccopula/simd/kernels.hpp"

namespace tccopula::simd::neon {

namespace {

namespace c = detail;

inline float64x2_t set1(double v) { return vdupq_n_f64(v); }

inline float64x2_t vexp(float64x2_t x) {
  const uint64x2_t under = vcltq_f64(x, set1(c::kExpUnderflow));
  const uint64x2_t over = vcgtq_f64(x, set1(709.0));

  const float64x2_t k = vrndnq_f64(vmulq_f64(x, set1(c::kLog2e)));
  const float64x2_t hi = vsubq_f64(x, vmulq_f64(k, set1(c::kLn2Hi)));
  const float64x2_t r = vsubq_f64(hi, vmulq_f64(k, set1(c::kLn2Lo)));

  float64x2_t p = set1(c::kExpTaylor[c::kExpDegree]);
  for (int i = c::kExpDegree - 1; i >= 0; --i)
    p = vaddq_f64(vmulq_f64(p, r), set1(c::kExpTaylor[i]));

  // Out-of-range lanes are replaced below; clamp k so the conversion stays defined.
  const float64x2_t kc = vminq_f64(vmaxq_f64(k, set1(-1100.0)), set1(1100.0));
  const int64x2_t ki = vcvtq_s64_f64(kc);
  const float64x2_t scale =
      vreinterpretq_f64_s64(vshlq_n_s64(vaddq_s64(ki, vdupq_n_s64(1023)), 52));

  float64x2_t res = vmulq_f64(p, scale);
  res = vbslq_f64(under, set1(0.0), res);
  res = vbslq_f64(over, set1(std::numeric_limits<double>::infinity()), res);
  return res;
}

inline float64x2_t vnormal_cdf(float64x2_t u) {
  const float64x2_t y = vmulq_f64(vabsq_f64(u), set1(c::kInvSqrt2));
  const uint64x2_t negative = vcltq_f64(u, set1(0.0));
  const float64x2_t half_one = set1(0.5);

  float64x2_t central;
  {
    const float64x2_t ysq = vmulq_f64(y, y);
    float64x2_t xnum = vmulq_f64(set1(c::kErfA[4]), ysq);
    float64x2_t xden = ysq;
    for (int i = 0; i < 3; ++i) {
      xnum = vmulq_f64(vaddq_f64(xnum, set1(c::kErfA[i])), ysq);
      xden = vmulq_f64(vaddq_f64(xden, set1(c::kErfB[i])), ysq);
    }
    const float64x2_t erf = vdivq_f64(vmulq_f64(y, vaddq_f64(xnum, set1(c::kErfA[3]))),
                                      vaddq_f64(xden, set1(c::kErfB[3])));
    const float64x2_t half = vmulq_f64(half_one, erf);
    central = vbslq_f64(negative, vsubq_f64(half_one, half), vaddq_f64(half_one, half));
  }

  float64x2_t r_mid;
  {
    float64x2_t xnum = vmulq_f64(set1(c::kErfcC[8]), y);
    float64x2_t xden = y;
    for (int i = 0; i < 7; ++i) {
      xnum = vmulq_f64(vaddq_f64(xnum, set1(c::kErfcC[i])), y);
      xden = vmulq_f64(vaddq_f64(xden, set1(c::kErfcD[i])), y);
    }
    r_mid = vdivq_f64(vaddq_f64(xnum, set1(c::kErfcC[7])), vaddq_f64(xden, set1(c::kErfcD[7])));
  }

  float64x2_t r_tail;
  {
    const float64x2_t ysq = vdivq_f64(set1(1.0), vmulq_f64(y, y));
    float64x2_t xnum = vmulq_f64(set1(c::kErfcP[5]), ysq);
    float64x2_t xden = ysq;
    for (int i = 0; i < 4; ++i) {
      xnum = vmulq_f64(vaddq_f64(xnum, set1(c::kErfcP[i])), ysq);
      xden = vmulq_f64(vaddq_f64(xden, set1(c::kErfcQ[i])), ysq);
    }
    r_tail = vdivq_f64(vmulq_f64(ysq, vaddq_f64(xnum, set1(c::kErfcP[4]))),
                       vaddq_f64(xden, set1(c::kErfcQ[4])));
    r_tail = vdivq_f64(vsubq_f64(set1(c::kInvSqrtPi), r_tail), y);
  }

  const float64x2_t r = vbslq_f64(vcleq_f64(y, set1(c::kErfcMid)), r_mid, r_tail);
  const float64x2_t ky = vrndq_f64(vmulq_f64(y, set1(16.0)));
  const float64x2_t t = vmulq_f64(ky, set1(0.0625));
  const float64x2_t del = vmulq_f64(vsubq_f64(y, t), vaddq_f64(y, t));
  // minnm keeps NaN lanes in range
  const int64x2_t idx = vcvtq_s64_f64(vminnmq_f64(ky, set1(c::kSquareTableLast)));
  const double* table = c::exp_neg_square_table();
  const float64x2_t e_tt = vcombine_f64(vld1_f64(table + vgetq_lane_s64(idx, 0)),
                                        vld1_f64(table + vgetq_lane_s64(idx, 1)));
  float64x2_t erfc_y = vmulq_f64(vmulq_f64(e_tt, vexp(vnegq_f64(del))), r);
  erfc_y = vbslq_f64(vcgeq_f64(y, set1(c::kErfcBig)), set1(0.0), erfc_y);

  const float64x2_t half = vmulq_f64(half_one, erfc_y);
  const float64x2_t tail = vbslq_f64(negative, half, vsubq_f64(set1(1.0), half));
  return vbslq_f64(vcleq_f64(y, set1(c::kErfSmall)), central, tail);
}

}  // namespace

void normal_cdf(std::span<const double> x, std::span<double> out) noexcept {
  const std::size_t n = x.size();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out.data() + i, vnormal_cdf(vld1q_f64(x.data() + i)));
  if (i < n) {
    double in[2] = {x[i], 0.0};
    double res[2];
    vst1q_f64(res, vnormal_cdf(vld1q_f64(in)));
    out[i] = res[0];
  }
}

void increment_powers(std::span<const double> values, std::span<double> squares,
                      std::span<double> fourths) noexcept {
  if (values.size() < 2) return;
  const std::size_t n = values.size() - 1;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(values.data() + i + 1), vld1q_f64(values.data() + i));
    const float64x2_t sq = vmulq_f64(d, d);
    vst1q_f64(squares.data() + i, sq);
    vst1q_f64(fourths.data() + i, vmulq_f64(sq, sq));
  }
  for (; i < n; ++i) {
    const double d = values[i + 1] - values[i];
    const double sq = d * d;
    squares[i] = sq;
    fourths[i] = sq * sq;
  }
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) noexcept {
  const std::size_t n = a.size();
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    m = vmaxq_f64(m, vabdq_f64(vld1q_f64(a.data() + i), vld1q_f64(b.data() + i)));
  double best = vmaxvq_f64(m);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    const double ad = d < 0.0 ? -d : d;
    best = ad > best ? ad : best;
  }
  return best;
}

}  // namespace tccopula::simd::neon
