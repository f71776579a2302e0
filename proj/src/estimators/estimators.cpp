#include <algorithm>
#include <cmath>

#include "tccopula/errors.hpp"
#include "tccopula/estimators.hpp"

namespace tccopula {

void CopulaQuery::validate(double horizon) const {
  const double slack = 1e-12 * std::max(1.0, horizon);
  if (!(s > 0.0 && t > 0.0 && s <= horizon + slack && t <= horizon + slack))
    throw DomainError("CopulaQuery: s and t must lie in (0, horizon]");
  if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0))
    throw DomainError("CopulaQuery: u and v must lie in [0,1]");
}

double copula_estimate(const PreparedPath& path, const CopulaQuery& q, const KernelConfig& cfg) {
  q.validate(path.horizon());
  const TimePair clocks{path.realized_variation(q.s), path.realized_variation(q.t)};
  return psi(clocks, {q.u, q.v}, cfg);
}

double variance_from_gradient(const TimeGradient& g, double q_s, double q_t) noexcept {
  // 2 (g_t, g_s) [[Q_t, Q_s], [Q_s, Q_s]] (g_t, g_s)' written as a sum of
  // nonnegative terms; Q_t >= Q_s >= 0.
  const double sum = g.d_t + g.d_s;
  return 2.0 * (g.d_t * g.d_t * (q_t - q_s) + sum * sum * q_s);
}

double variance_estimate(const PreparedPath& path, const CopulaQuery& q, const KernelConfig& cfg) {
  q.validate(path.horizon());
  if (!(q.u > 0.0 && q.u < 1.0 && q.v > 0.0 && q.v < 1.0))
    throw DomainError("variance_estimate: requires u, v in (0,1)");
  if (q.s == q.t) throw DomainError("variance_estimate: requires s != t");
  const double s = std::min(q.s, q.t);
  const double t = std::max(q.s, q.t);
  const double rv_s = path.realized_variation(s);
  const double rv_t = path.realized_variation(t);
  // equal clocks (no increments between s and t) are the diagonal, not a domain error
  if (rv_t - rv_s <= cfg.diag_rel_tol * rv_t && rv_t > 0.0)
    throw NearDiagonalError("variance_estimate: realized variations at s and t coincide");
  const TimeGradient g = grad_psi({rv_s, rv_t}, {q.u, q.v}, cfg);
  return variance_from_gradient(g, path.quarticity(s), path.quarticity(t));
}

CopulaEstimate studentized_interval(double c_hat, double v_hat, int n, double u, double v,
                                    double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0,1)");
  if (!(v_hat >= 0.0)) throw DomainError("variance must be >= 0");
  if (n < 1) throw DomainError("n must be >= 1");
  const double z = std_normal_quantile(0.5 * (1.0 + level));
  const double half_width = z * std::sqrt(v_hat / n);
  const double lower_bound = std::max(u + v - 1.0, 0.0);
  const double upper_bound = std::min(u, v);

  CopulaEstimate e;
  e.c_hat = c_hat;
  e.v_hat = v_hat;
  e.level = level;
  e.ci_lo = std::min(std::max(c_hat - half_width, lower_bound), c_hat);
  e.ci_hi = std::max(std::min(c_hat + half_width, upper_bound), c_hat);
  return e;
}

CopulaEstimate confidence_interval(const PreparedPath& path, const CopulaQuery& q, double level,
                                   const KernelConfig& cfg) {
  q.validate(path.horizon());
  const double rv_s = path.realized_variation(q.s);
  const double rv_t = path.realized_variation(q.t);
  const double c_hat = psi({rv_s, rv_t}, {q.u, q.v}, cfg);
  const bool boundary = q.u == 0.0 || q.u == 1.0 || q.v == 0.0 || q.v == 1.0;
  const double v_hat = boundary ? 0.0 : variance_estimate(path, q, cfg);
  CopulaEstimate e = studentized_interval(c_hat, v_hat, path.n(), q.u, q.v, level);
  e.rv_s = rv_s;
  e.rv_t = rv_t;
  return e;
}

}  // namespace tccopula
