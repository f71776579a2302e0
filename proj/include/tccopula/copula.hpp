#pragma once

#include <span>
#include <vector>

#include "tccopula/gaussmath.hpp"

namespace tccopula {

/// Two clock values (time-change levels) at which the Brownian copula is
/// evaluated. Order does not matter for the copula itself.
struct TimePair {
  double s = 0.0;
  double t = 0.0;

  double lo() const noexcept { return s < t ? s : t; }
  double hi() const noexcept { return s < t ? t : s; }
  void validate() const;
};

struct UnitPair {
  double u = 0.0;
  double v = 0.0;

  void validate() const;
};

struct KernelConfig {
  /// |t-s| <= diag_rel_tol * max(s,t) is treated as the diagonal t = s.
  double diag_rel_tol = 1e-12;
  QuadratureConfig quad{};

  void validate() const;
};

/// ψ(s,t;u,v): the copula of (B_s, B_t) for a standard Brownian motion B.
///   - min(u,v) on the diagonal t = s > 0,
///   - u·v when min(s,t) = 0,
///   - ∫₀ᵘ Φ((√(s∨t)Φ⁻¹(v) − √(s∧t)Φ⁻¹(w)) / √|t−s|) dw otherwise.
/// Boundary values u,v ∈ {0,1} are returned exactly without quadrature.
/// Throws DomainError on invalid arguments and ConvergenceError (with the
/// offending point in the message) when the quadrature fails.
double psi(const TimePair& tp, const UnitPair& up, const KernelConfig& cfg = {});

/// True when the pair falls on the diagonal branch under cfg.diag_rel_tol.
bool on_diagonal(const TimePair& tp, const KernelConfig& cfg) noexcept;

struct TimeGradient {
  double d_t = 0.0;  ///< ∂ψ/∂t, t the larger clock value
  double d_s = 0.0;  ///< ∂ψ/∂s, s the smaller clock value
};

/// Temporal gradient of ψ for 0 < s < t and u, v ∈ (0,1). The pair is not
/// reordered: s must be the smaller value. Throws NearDiagonalError when
/// t - s <= diag_rel_tol * t and DomainError for other violations.
TimeGradient grad_psi(const TimePair& tp, const UnitPair& up, const KernelConfig& cfg = {});

/// Evaluates ψ(s,t;·,v) and ∇ψ(s,t;·,v) along a fixed, sorted grid of u
/// values by accumulating panel integrals between consecutive grid points.
/// First-pass Gauss–Kronrod nodes are fixed at construction. Segments whose
/// estimate exceeds their share of the tolerance, or that the kernel's
/// transition makes unsafe for a fixed rule, fall back to adaptive quadrature.
class UGridProfile {
 public:
  explicit UGridProfile(std::vector<double> u_grid, KernelConfig cfg = {});

  const std::vector<double>& grid() const noexcept { return u_; }
  const KernelConfig& config() const noexcept { return cfg_; }

  /// out[k] = ψ(tp; u_grid[k], v); matches psi() within cfg.quad.abs_tol.
  void psi(const TimePair& tp, double v, std::span<double> out) const;

  /// Gradient components along the grid; same preconditions as grad_psi
  /// except that u_grid may contain 0 and 1 (the components are 0 at u = 0,
  /// and at u = 1 they are the exact limits, i.e. 0 as well).
  void grad_psi(const TimePair& tp, double v, std::span<double> d_t, std::span<double> d_s) const;

 private:
  // One grid interval, held in z = Φ⁻¹(w) and cut into panels no wider than
  // a fixed bound; the GK15 nodes and φ at them are cached.
  struct Segment {
    double za;
    double zb;
    double tol;
    std::size_t first_panel;
    std::size_t panel_count;
  };

  struct Panels {
    std::vector<double> a, b;   // panel bounds in z
    std::vector<double> nodes;  // 15 per panel
    std::vector<double> pdf;    // φ(nodes)
    void add(double lo, double hi);
  };

  template <class Terms>
  double segment_value(const Segment& seg, std::span<const double> fx, const BatchIntegrand& refine,
                       const Terms& terms, const char* what, const TimePair& tp, double v,
                       bool gradient) const;

  std::vector<double> u_;
  KernelConfig cfg_;
  std::vector<Segment> segments_;         // [0,u0], [u0,u1], ... skipping empty ones
  std::vector<std::size_t> segment_end_;  // segments_ index after which u_[k] is reached
  Panels panels_;
};

}  // namespace tccopula
