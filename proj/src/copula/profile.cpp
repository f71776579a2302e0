#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

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

thread_local std::vector<double> tl_a;
thread_local std::vector<double> tl_b;

std::string label(const TimePair& tp, double v) {
  std::ostringstream os;
  os << "(s=" << num(tp.s) << ", t=" << num(tp.t) << ", v=" << num(v) << ")";
  return os.str();
}

}  // namespace

void UGridProfile::Panels::add(double lo, double hi) {
  a.push_back(lo);
  b.push_back(hi);
  const std::size_t at = nodes.size();
  nodes.resize(at + kGk15Points);
  pdf.resize(at + kGk15Points);
  std::span<double> x(nodes.data() + at, kGk15Points);
  gk15_nodes(lo, hi, x);
  for (std::size_t j = 0; j < kGk15Points; ++j) pdf[at + j] = std_normal_pdf(x[j]);
}

UGridProfile::UGridProfile(std::vector<double> u_grid, KernelConfig cfg)
    : u_(std::move(u_grid)), cfg_(cfg) {
  cfg_.validate();
  if (!std::is_sorted(u_.begin(), u_.end()))
    throw DomainError("UGridProfile: u grid must be sorted");
  if (!u_.empty() && (u_.front() < 0.0 || u_.back() > 1.0))
    throw DomainError("UGridProfile: u grid must lie in [0,1]");

  const double span_total = u_.empty() ? 0.0 : u_.back();
  double prev = 0.0;
  segment_end_.reserve(u_.size());
  for (double u : u_) {
    if (u > prev) {
      const double za = detail::z_of_lower(prev, u);
      const double zb = detail::z_of_upper(prev, u);
      Segment seg{za, zb, cfg_.quad.abs_tol * (u - prev) / span_total, panels_.a.size(), 0};
      const auto pieces =
          static_cast<std::size_t>(std::max(1.0, std::ceil((zb - za) / detail::kMaxPanelWidth)));
      const double h = (zb - za) / static_cast<double>(pieces);
      for (std::size_t p = 0; p < pieces; ++p)
        panels_.add(za + h * static_cast<double>(p), p + 1 == pieces ? zb : za + h * static_cast<double>(p + 1));
      seg.panel_count = pieces;
      segments_.push_back(seg);
      prev = u;
    }
    segment_end_.push_back(segments_.size());
  }
}

template <class Terms>
double UGridProfile::segment_value(const Segment& seg, std::span<const double> fx,
                                   const BatchIntegrand& refine, const Terms& terms,
                                   const char* what, const TimePair& tp, double v,
                                   bool gradient) const {
  double value = 0.0;
  double error = 0.0;
  bool safe = true;
  const double rel = gradient ? detail::kGradRelTol : 0.0;
  for (std::size_t p = seg.first_panel; p < seg.first_panel + seg.panel_count; ++p) {
    const PanelEstimate est = gk15_panel(panels_.a[p], panels_.b[p],
                                         fx.subspan(p * kGk15Points, kGk15Points));
    value += est.value;
    error += est.abs_error;
    safe = safe && terms.rule_safe(panels_.a[p], panels_.b[p]);
  }
  if (safe && (error <= seg.tol || error <= rel * std::fabs(value))) return value;

  QuadratureConfig local = cfg_.quad;
  local.abs_tol = seg.tol;
  try {
    return detail::integrate_split(refine, terms, seg.za, seg.zb, local, rel);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(std::string(what) + label(tp, v) + ": " + e.what(), e.estimate(),
                           e.abs_error());
  }
}

void UGridProfile::psi(const TimePair& tp, double v, std::span<double> out) const {
  tp.validate();
  if (!(v >= 0.0 && v <= 1.0)) throw DomainError("UGridProfile::psi: v must lie in [0,1]");
  if (out.size() < u_.size()) throw DomainError("UGridProfile::psi: output too short");

  const std::size_t m = u_.size();
  if (v == 0.0) {
    std::fill_n(out.begin(), m, 0.0);
    return;
  }
  if (v == 1.0 || on_diagonal(tp, cfg_) || tp.lo() == 0.0) {
    const bool diag = v != 1.0 && on_diagonal(tp, cfg_);
    for (std::size_t k = 0; k < m; ++k) {
      const double u = u_[k];
      out[k] = v == 1.0 ? u : (diag ? std::min(u, v) : u * v);
    }
    return;
  }

  const detail::KernelTerms terms(tp.lo(), tp.hi(), v);
  std::vector<double>& fx = tl_a;
  fx.resize(panels_.nodes.size());
  detail::psi_integrand(terms, panels_.nodes, panels_.pdf, fx);
  const BatchIntegrand refine = detail::PsiZ(terms);

  double cumulative = 0.0;
  std::size_t done = 0;
  for (std::size_t k = 0; k < m; ++k) {
    for (; done < segment_end_[k]; ++done)
      cumulative += segment_value(segments_[done], fx, refine, terms, "UGridProfile::psi", tp, v, false);
    const double u = u_[k];
    out[k] = u == 0.0 ? 0.0 : (u == 1.0 ? v : cumulative);
  }
}

void UGridProfile::grad_psi(const TimePair& tp, double v, std::span<double> d_t,
                            std::span<double> d_s) const {
  tp.validate();
  if (!(tp.s > 0.0 && tp.s < tp.t)) throw DomainError("UGridProfile::grad_psi: requires 0 < s < t");
  if (!(v >= 0.0 && v <= 1.0)) throw DomainError("UGridProfile::grad_psi: v must lie in [0,1]");
  if (tp.t - tp.s <= cfg_.diag_rel_tol * tp.t)
    throw NearDiagonalError("UGridProfile::grad_psi: s and t too close to separate" + label(tp, v));
  if (d_t.size() < u_.size() || d_s.size() < u_.size())
    throw DomainError("UGridProfile::grad_psi: output too short");

  const std::size_t m = u_.size();
  if (v == 0.0 || v == 1.0) {
    std::fill_n(d_t.begin(), m, 0.0);
    std::fill_n(d_s.begin(), m, 0.0);
    return;
  }

  const detail::KernelTerms terms(tp.s, tp.t, v);
  std::vector<double>& ft = tl_a;
  std::vector<double>& fs = tl_b;
  ft.resize(panels_.nodes.size());
  fs.resize(panels_.nodes.size());
  detail::grad_integrands(terms, panels_.nodes, panels_.pdf, ft, fs);
  const BatchIntegrand refine_t = detail::GradZ(terms, true);
  const BatchIntegrand refine_s = detail::GradZ(terms, false);

  double cum_t = 0.0;
  double cum_s = 0.0;
  std::size_t done = 0;
  for (std::size_t k = 0; k < m; ++k) {
    for (; done < segment_end_[k]; ++done) {
      cum_t += segment_value(segments_[done], ft, refine_t, terms, "UGridProfile::grad_psi", tp, v, true);
      cum_s += segment_value(segments_[done], fs, refine_s, terms, "UGridProfile::grad_psi", tp, v, true);
    }
    const double u = u_[k];
    const bool edge = u == 0.0 || u == 1.0;
    d_t[k] = edge ? 0.0 : cum_t;
    d_s[k] = edge ? 0.0 : cum_s;
  }
}

}  // namespace tccopula
