#pragma once

// Integrands of the Brownian copula kernel and of its temporal gradient,
// shared by the pointwise evaluators and the grid profile.
//
// Both work in z = Φ⁻¹(w), where ∫₀ᵘ Φ(A(w)) dw = ∫ Φ(A(z)) φ(z) dz over
// (-inf, Φ⁻¹(u)] and A is linear in z. The integrand is then smooth; all of
// its structure sits in a window around z* = A⁻¹(0) whose width scales with
// sqrt(gap / lo). In w the same transition can be far narrower than the
// spacing of any fixed rule near 0, and gets missed.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "tccopula/errors.hpp"
#include "tccopula/gaussmath.hpp"
#include "tccopula/simd/kernels.hpp"

namespace tccopula::detail {

// Mass of φ below -kZCut is under 1e-20; integrals are truncated there.
inline constexpr double kZCut = 9.5;
// Beyond |A| = kSaturate, Φ(A) is exactly 0 or 1 in double and φ(A) underflows.
inline constexpr double kSaturate = 38.5;
inline constexpr double kMaxPanelWidth = 1.0;

struct KernelTerms {
  double lo;
  double hi;
  double sqrt_lo;
  double sqrt_hi;
  double gap;
  double sqrt_gap;
  double qv;
  double z_star;  // A(z_star) = 0
  double width;   // A(z) = (z_star - z) / width

  KernelTerms(double lo, double hi, double v)
      : lo(lo),
        hi(hi),
        sqrt_lo(std::sqrt(lo)),
        sqrt_hi(std::sqrt(hi)),
        gap(hi - lo),
        sqrt_gap(std::sqrt(hi - lo)),
        qv(std_normal_quantile(v)),
        z_star(sqrt_hi * qv / sqrt_lo),
        width(sqrt_gap / sqrt_lo) {}

  double argument(double z) const noexcept { return (sqrt_hi * qv - sqrt_lo * z) / sqrt_gap; }

  double window_lo() const noexcept { return z_star - kSaturate * width; }
  double window_hi() const noexcept { return z_star + kSaturate * width; }

  // A fixed rule on [za, zb] is trusted when the transition is either absent
  // or wide compared with the panel.
  bool rule_safe(double za, double zb) const noexcept {
    return zb - za <= 4.0 * width || zb <= window_lo() || za >= window_hi();
  }
};

/// z-limits of the w-interval [a, b], truncated where φ is negligible.
inline double z_of_lower(double a, double b) {
  if (a > 0.0) return std_normal_quantile(a);
  const double zb = b < 1.0 ? std_normal_quantile(b) : kZCut;
  return std::min(-kZCut, zb - 6.0);
}
inline double z_of_upper(double a, double b) {
  if (b < 1.0) return std_normal_quantile(b);
  const double za = a > 0.0 ? std_normal_quantile(a) : -kZCut;
  return std::max(kZCut, za + 6.0);
}

/// fx[i] = Φ(A(z_i)) φ(z_i); pdf[i] = φ(z_i) is supplied by the caller.
inline void psi_integrand(const KernelTerms& k, std::span<const double> z,
                          std::span<const double> pdf, std::span<double> fx) {
  for (std::size_t i = 0; i < z.size(); ++i) fx[i] = k.argument(z[i]);
  simd::normal_cdf(std::span<const double>(fx.data(), z.size()), fx);
  for (std::size_t i = 0; i < z.size(); ++i) fx[i] *= pdf[i];
}

/// ∂_t and ∂_s integrands of ψ in z for lo < hi (lo = s, hi = t).
inline void grad_integrands(const KernelTerms& k, std::span<const double> z,
                            std::span<const double> pdf, std::span<double> ft,
                            std::span<double> fs) {
  const double c_t = k.qv / (2.0 * std::sqrt(k.hi * k.gap));
  const double inv_two_gap = 1.0 / (2.0 * k.gap);
  const double c_s = 1.0 / (2.0 * std::sqrt(k.lo * k.gap));
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double a = k.argument(z[i]);
    const double density = std::fabs(a) > kSaturate ? 0.0 : std_normal_pdf(a) * pdf[i];
    ft[i] = density * (c_t - a * inv_two_gap);
    fs[i] = density * (a * inv_two_gap - z[i] * c_s);
  }
}

// Gradient integrals grow like 1/sqrt(gap) near the diagonal, so an absolute
// tolerance alone can sit below their rounding floor; they also accept
// kGradRelTol relative to the value.
inline constexpr double kGradRelTol = 1e-12;

/// ∫ f over [za, zb] by adaptive quadrature, split at the edges and the
/// centre of the transition window; the tolerance is shared equally. A piece is accepted when its error is
/// within its share of cfg.abs_tol or within rel_tol of its value; otherwise
/// throws ConvergenceError.
inline double integrate_split(const BatchIntegrand& f, const KernelTerms& k, double za, double zb,
                              const QuadratureConfig& cfg, double rel_tol = 0.0) {
  if (!(zb > za)) return 0.0;
  double cuts[5] = {za, k.window_lo(), k.z_star, k.window_hi(), zb};
  std::size_t n = 1;
  for (std::size_t i = 1; i < 4; ++i)
    if (cuts[i] > cuts[n - 1] && cuts[i] < zb) cuts[n++] = cuts[i];
  cuts[n++] = zb;
  double total = 0.0;
  QuadratureConfig local = cfg;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    local.abs_tol = cfg.abs_tol / static_cast<double>(n - 1);
    if (rel_tol == 0.0) {
      total += integrate(f, cuts[i], cuts[i + 1], local);
      continue;
    }
    const QuadratureResult r = integrate_adaptive(f, cuts[i], cuts[i + 1], local);
    if (!r.converged && !(r.abs_error <= rel_tol * std::fabs(r.value)))
      throw ConvergenceError("integrate: no convergence on [" + std::to_string(cuts[i]) + ", " +
                                 std::to_string(cuts[i + 1]) + "] (estimate " +
                                 std::to_string(r.value) + ", error " + std::to_string(r.abs_error) + ")",
                             r.value, r.abs_error);
    total += r.value;
  }
  return total;
}

/// Batch wrappers that evaluate φ at the abscissae on the fly.
class PsiZ {
 public:
  explicit PsiZ(const KernelTerms& k) : k_(k) {}
  void operator()(std::span<const double> z, std::span<double> fx) {
    pdf_.resize(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) pdf_[i] = std_normal_pdf(z[i]);
    psi_integrand(k_, z, pdf_, fx);
  }

 private:
  const KernelTerms& k_;
  std::vector<double> pdf_;
};

class GradZ {
 public:
  GradZ(const KernelTerms& k, bool want_t) : k_(k), want_t_(want_t) {}
  void operator()(std::span<const double> z, std::span<double> fx) {
    pdf_.resize(z.size());
    other_.resize(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) pdf_[i] = std_normal_pdf(z[i]);
    if (want_t_)
      grad_integrands(k_, z, pdf_, fx, other_);
    else
      grad_integrands(k_, z, pdf_, other_, fx);
  }

 private:
  const KernelTerms& k_;
  bool want_t_;
  std::vector<double> pdf_;
  std::vector<double> other_;
};

}  // namespace tccopula::detail
