#include <cmath>
#include <sstream>

#include "tccopula/errors.hpp"
#include "tccopula/estimators.hpp"
#include "tccopula/simd/kernels.hpp"

namespace tccopula {

namespace {

constexpr double kIndexGuard = 1e-9;

void check_time(double t, const SampledPath& path) {
  const double slack = kIndexGuard / path.n;
  if (!(std::isfinite(t) && t >= 0.0 && t <= path.horizon + slack)) {
    std::ostringstream os;
    os << "time " << t << " outside the observation window [0, " << path.horizon << "]";
    throw DomainError(os.str());
  }
}

std::size_t clamp_index(double t, const SampledPath& path) {
  check_time(t, path);
  const std::size_t k = grid_index(t, path.n);
  return std::min(k, path.intervals());
}

}  // namespace

std::size_t grid_index(double t, int n) noexcept {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * t + kIndexGuard));
}

std::size_t SampledPath::intervals() const noexcept { return grid_index(horizon, n); }

void SampledPath::validate() const {
  if (n < 1) throw DomainError("SampledPath: n must be >= 1");
  if (!(std::isfinite(horizon) && horizon > 0.0)) throw DomainError("SampledPath: horizon must be > 0");
  if (values.size() != intervals() + 1) {
    std::ostringstream os;
    os << "SampledPath: expected " << intervals() + 1 << " values for n=" << n
       << " and horizon=" << horizon << ", got " << values.size();
    throw DomainError(os.str());
  }
  for (double x : values)
    if (!std::isfinite(x)) throw DomainError("SampledPath: values must be finite");
}

double realized_variation(const SampledPath& path, double t) {
  path.validate();
  const std::size_t k = clamp_index(t, path);
  double sum = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    const double d = path.values[i] - path.values[i - 1];
    sum += d * d;
  }
  return sum;
}

double quarticity(const SampledPath& path, double t) {
  path.validate();
  const std::size_t k = clamp_index(t, path);
  double sum = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    const double d = path.values[i] - path.values[i - 1];
    const double sq = d * d;
    sum += sq * sq;
  }
  return static_cast<double>(path.n) / 3.0 * sum;
}

PreparedPath::PreparedPath(SampledPath path) : path_(std::move(path)) {
  path_.validate();
  const std::size_t m = path_.intervals();
  std::vector<double> squares(m);
  std::vector<double> fourths(m);
  simd::increment_powers(path_.values, squares, fourths);
  rv_prefix_.assign(m + 1, 0.0);
  q4_prefix_.assign(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    rv_prefix_[i + 1] = rv_prefix_[i] + squares[i];
    q4_prefix_[i + 1] = q4_prefix_[i] + fourths[i];
  }
}

std::size_t PreparedPath::checked_index(double t) const { return clamp_index(t, path_); }

double PreparedPath::realized_variation(double t) const { return rv_prefix_[checked_index(t)]; }

double PreparedPath::quarticity(double t) const {
  return static_cast<double>(path_.n) / 3.0 * q4_prefix_[checked_index(t)];
}

}  // namespace tccopula
