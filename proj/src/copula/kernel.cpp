#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <vector>

#include "integrands.hpp"
#include "tccopula/copula.hpp"
#include "tccopula/errors.hpp"

namespace tccopula {

namespace {

std::string num(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string point_label(const TimePair& tp, const UnitPair& up) {
  std::ostringstream os;
  os << "(s=" << num(tp.s) << ", t=" << num(tp.t) << ", u=" << num(up.u) << ", v=" << num(up.v) << ")";
  return os.str();
}

}  // namespace

void TimePair::validate() const {
  if (!(std::isfinite(s) && std::isfinite(t) && s >= 0.0 && t >= 0.0))
    throw DomainError("TimePair: s and t must be finite and >= 0");
}

void UnitPair::validate() const {
  if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0))
    throw DomainError("UnitPair: u and v must lie in [0,1]");
}

void KernelConfig::validate() const {
  if (!(diag_rel_tol >= 0.0)) throw DomainError("KernelConfig: diag_rel_tol must be >= 0");
  quad.validate();
}

bool on_diagonal(const TimePair& tp, const KernelConfig& cfg) noexcept {
  const double hi = tp.hi();
  return hi > 0.0 && std::fabs(tp.t - tp.s) <= cfg.diag_rel_tol * hi;
}

double psi(const TimePair& tp, const UnitPair& up, const KernelConfig& cfg) {
  tp.validate();
  up.validate();
  cfg.validate();
  const double u = up.u;
  const double v = up.v;
  if (u == 0.0 || v == 0.0) return 0.0;
  if (v == 1.0) return u;
  if (u == 1.0) return v;
  if (on_diagonal(tp, cfg)) return std::min(u, v);
  if (tp.lo() == 0.0) return u * v;

  const detail::KernelTerms terms(tp.lo(), tp.hi(), v);
  const BatchIntegrand integrand = detail::PsiZ(terms);
  try {
    return detail::integrate_split(integrand, terms, detail::z_of_lower(0.0, u),
                                   detail::z_of_upper(0.0, u), cfg.quad);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError("psi" + point_label(tp, up) + ": " + e.what(), e.estimate(),
                           e.abs_error());
  }
}

TimeGradient grad_psi(const TimePair& tp, const UnitPair& up, const KernelConfig& cfg) {
  tp.validate();
  cfg.validate();
  if (!(tp.s > 0.0 && tp.s < tp.t))
    throw DomainError("grad_psi: requires 0 < s < t, got " + point_label(tp, up));
  if (!(up.u > 0.0 && up.u < 1.0 && up.v > 0.0 && up.v < 1.0))
    throw DomainError("grad_psi: requires u, v in (0,1), got " + point_label(tp, up));
  if (tp.t - tp.s <= cfg.diag_rel_tol * tp.t)
    throw NearDiagonalError("grad_psi: s and t too close to separate " + point_label(tp, up));

  const detail::KernelTerms terms(tp.s, tp.t, up.v);
  const double za = detail::z_of_lower(0.0, up.u);
  const double zb = detail::z_of_upper(0.0, up.u);
  try {
    TimeGradient g;
    g.d_t = detail::integrate_split(detail::GradZ(terms, true), terms, za, zb, cfg.quad,
                                    detail::kGradRelTol);
    g.d_s = detail::integrate_split(detail::GradZ(terms, false), terms, za, zb, cfg.quad,
                                    detail::kGradRelTol);
    return g;
  } catch (const ConvergenceError& e) {
    throw ConvergenceError("grad_psi" + point_label(tp, up) + ": " + e.what(), e.estimate(),
                           e.abs_error());
  }
}

}  // namespace tccopula
