#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

#include "tccopula/simd/detail/constants.hpp"
#include "tccopula/simd/kernels.hpp"

namespace tccopula::simd {

const double* detail::exp_neg_square_table() noexcept {
  static const auto table = [] {
    std::array<double, detail::kSquareTableLast + 1> t{};
    for (int k = 0; k <= detail::kSquareTableLast; ++k) {
      const double x = k * 0.0625;
      t[k] = scalar::exp_one(-(x * x));
    }
    return t;
  }();
  return table.data();
}

namespace scalar {

namespace c = detail;

double exp_one(double x) noexcept {
  if (std::isnan(x)) return x;
  if (x < c::kExpUnderflow) return 0.0;
  if (x > 709.0) return std::numeric_limits<double>::infinity();
  const double k = std::nearbyint(x * c::kLog2e);
  const double hi = x - k * c::kLn2Hi;
  const double r = hi - k * c::kLn2Lo;
  double p = c::kExpTaylor[c::kExpDegree];
  for (int i = c::kExpDegree - 1; i >= 0; --i) p = p * r + c::kExpTaylor[i];
  const auto ki = static_cast<std::int64_t>(k);
  const double scale = std::bit_cast<double>(static_cast<std::uint64_t>(ki + 1023) << 52);
  return p * scale;
}

double normal_cdf_one(double u) noexcept {
  const double y = std::fabs(u) * c::kInvSqrt2;

  if (y <= c::kErfSmall) {
    const double ysq = y * y;
    double xnum = c::kErfA[4] * ysq;
    double xden = ysq;
    for (int i = 0; i < 3; ++i) {
      xnum = (xnum + c::kErfA[i]) * ysq;
      xden = (xden + c::kErfB[i]) * ysq;
    }
    const double half = 0.5 * (y * (xnum + c::kErfA[3]) / (xden + c::kErfB[3]));
    return u < 0.0 ? 0.5 - half : 0.5 + half;
  }

  double erfc_y = 0.0;
  if (!(y >= c::kErfcBig)) {
    double r;
    if (y <= c::kErfcMid) {
      double xnum = c::kErfcC[8] * y;
      double xden = y;
      for (int i = 0; i < 7; ++i) {
        xnum = (xnum + c::kErfcC[i]) * y;
        xden = (xden + c::kErfcD[i]) * y;
      }
      r = (xnum + c::kErfcC[7]) / (xden + c::kErfcD[7]);
    } else {
      const double ysq = 1.0 / (y * y);
      double xnum = c::kErfcP[5] * ysq;
      double xden = ysq;
      for (int i = 0; i < 4; ++i) {
        xnum = (xnum + c::kErfcP[i]) * ysq;
        xden = (xden + c::kErfcQ[i]) * ysq;
      }
      r = ysq * (xnum + c::kErfcP[4]) / (xden + c::kErfcQ[4]);
      r = (c::kInvSqrtPi - r) / y;
    }
    const double ky = std::trunc(y * 16.0);
    const double t = ky * 0.0625;
    const double del = (y - t) * (y + t);
    const int idx = ky < c::kSquareTableLast ? static_cast<int>(ky) : c::kSquareTableLast;
    erfc_y = c::exp_neg_square_table()[idx] * exp_one(-del) * r;
  }
  const double half = 0.5 * erfc_y;
  return u < 0.0 ? half : 1.0 - half;
}

void normal_cdf(std::span<const double> x, std::span<double> out) noexcept {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = normal_cdf_one(x[i]);
}

void increment_powers(std::span<const double> values, std::span<double> squares,
                      std::span<double> fourths) noexcept {
  if (values.size() < 2) return;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const double d = values[i + 1] - values[i];
    const double sq = d * d;
    squares[i] = sq;
    fourths[i] = sq * sq;
  }
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) noexcept {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace scalar

}  // namespace tccopula::simd
