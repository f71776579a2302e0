#pragma once

#include <cstddef>
#include <vector>

#include "tccopula/copula.hpp"

namespace tccopula {

/// A path observed at times i/n, i = 0..⌊n·horizon⌋.
struct SampledPath {
  std::vector<double> values;
  int n = 1;             ///< observations per unit time
  double horizon = 1.0;  ///< observation window [0, horizon]

  /// ⌊n·horizon⌋ with the same guard used for query times.
  std::size_t intervals() const noexcept;
  /// Throws DomainError unless the length, n, horizon and values are consistent.
  void validate() const;
};

/// Number of grid increments up to time t: ⌊n·t + 1e-9⌋, so a grid time
/// k/n computed in floating point maps to k.
std::size_t grid_index(double t, int n) noexcept;

/// [X]ⁿ_t = Σ_{i ≤ ⌊nt⌋} (X_{i/n} − X_{(i−1)/n})², summed directly.
double realized_variation(const SampledPath& path, double t);

/// Qⁿ_t = (n/3) Σ_{i ≤ ⌊nt⌋} |X_{i/n} − X_{(i−1)/n}|⁴, summed directly.
double quarticity(const SampledPath& path, double t);

/// A path with prefix sums of squared and fourth-power increments, so that
/// any number of time queries cost O(1) each. Immutable after construction.
class PreparedPath {
 public:
  explicit PreparedPath(SampledPath path);

  const SampledPath& path() const noexcept { return path_; }
  int n() const noexcept { return path_.n; }
  double horizon() const noexcept { return path_.horizon; }

  double realized_variation(double t) const;
  double quarticity(double t) const;

 private:
  std::size_t checked_index(double t) const;

  SampledPath path_;
  std::vector<double> rv_prefix_;  // rv_prefix_[k] = Σ_{i<k} squares
  std::vector<double> q4_prefix_;
};

struct CopulaQuery {
  double s = 0.0;
  double t = 0.0;
  double u = 0.0;
  double v = 0.0;

  /// Throws DomainError unless 0 < s, t <= horizon and u, v in [0,1].
  void validate(double horizon) const;
};

struct CopulaEstimate {
  double c_hat = 0.0;
  double v_hat = 0.0;  ///< variance of the √n-scaled limit
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double level = 0.95;
  double rv_s = 0.0;  ///< [X]ⁿ_s used for c_hat and v_hat
  double rv_t = 0.0;
};

/// Cⁿ(s,t;u,v) = ψ([X]ⁿ_s, [X]ⁿ_t; u, v).
double copula_estimate(const PreparedPath& path, const CopulaQuery& q, const KernelConfig& cfg = {});

/// Vⁿ = 2 ∇ψ M ∇ψ′ with M = [[Qⁿ_t, Qⁿ_s], [Qⁿ_s, Qⁿ_s]], the gradient taken
/// at the realized variations in (∂_t, ∂_s) order. The pair is sorted first
/// when s > t. Requires u, v in (0,1) and s != t; propagates
/// NearDiagonalError when the realized variations nearly coincide.
double variance_estimate(const PreparedPath& path, const CopulaQuery& q, const KernelConfig& cfg = {});

/// The plug-in variance for given clock values and quarticities, s < t.
double variance_from_gradient(const TimeGradient& g, double q_s, double q_t) noexcept;

/// c_hat ± z_{(1+level)/2} √(v_hat/n), clipped to the Fréchet bounds
/// [max(u+v−1,0), min(u,v)].
CopulaEstimate studentized_interval(double c_hat, double v_hat, int n, double u, double v,
                                    double level);

/// Estimate, variance and interval at one query. On the (u,v) boundary the
/// copula is known exactly and the interval has zero width.
CopulaEstimate confidence_interval(const PreparedPath& path, const CopulaQuery& q, double level,
                                   const KernelConfig& cfg = {});

}  // namespace tccopula
