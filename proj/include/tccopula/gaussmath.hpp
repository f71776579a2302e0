#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace tccopula {

/// Φ, the standard normal distribution function.
double std_normal_cdf(double x) noexcept;

/// φ, the standard normal density.
double std_normal_pdf(double x) noexcept;

/// Φ⁻¹ for p in (0,1): AS241 (PPND16) followed by one Newton step against
/// std_normal_cdf. Throws DomainError outside the open unit interval.
double std_normal_quantile(double p);

struct QuadratureConfig {
  double abs_tol = 1e-10;
  int max_subdivisions = 200;

  /// Throws DomainError unless abs_tol > 0 and max_subdivisions >= 1.
  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  int intervals = 0;
  bool converged = false;
};

/// Fills fx[i] = f(x[i]) for every abscissa in one call.
using BatchIntegrand = std::function<void(std::span<const double> x, std::span<double> fx)>;

/// One 15-point Gauss–Kronrod panel on [a, b] with the QUADPACK error
/// estimate. `fx` holds the integrand at gk15_nodes(a, b).
struct PanelEstimate {
  double value;
  double abs_error;
};
inline constexpr std::size_t kGk15Points = 15;
void gk15_nodes(double a, double b, std::span<double> x) noexcept;
PanelEstimate gk15_panel(double a, double b, std::span<const double> fx) noexcept;

/// Globally adaptive Gauss–Kronrod (G7/K15) quadrature with bisection of the
/// panel carrying the largest error estimate. Does not throw on
/// non-convergence; inspect `converged`.
QuadratureResult integrate_adaptive(const BatchIntegrand& f, double a, double b,
                                    const QuadratureConfig& cfg);

/// Like integrate_adaptive but throws ConvergenceError when the tolerance is
/// not met within cfg.max_subdivisions panels.
double integrate(const BatchIntegrand& f, double a, double b, const QuadratureConfig& cfg);
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureConfig& cfg);

}  // namespace tccopula
