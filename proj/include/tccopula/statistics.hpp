#pragma once

#include <span>
#include <vector>

namespace tccopula {

double mean(std::span<const double> x);

/// Unbiased sample variance (denominator M−1); requires at least 2 values.
double sample_variance(std::span<const double> x);

/// Linear-interpolation quantile of the sorted sample (R's type 7).
double quantile(std::vector<double> x, double p);

double median(std::vector<double> x);

/// Kolmogorov–Smirnov distance sup_x |F_M(x) − Φ(x)| of the sample to N(0,1).
double ks_distance_normal(std::vector<double> x);

struct DensityEstimate {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;
};

/// Gaussian kernel density estimate of log(samples) on 512 points spanning
/// [min − 3h, max + 3h], with Silverman's bandwidth
/// h = 0.9·min(sd, IQR/1.34)·M^{−1/5}. When one of sd and IQR/1.34 is zero
/// the other is used. The density is rescaled so that its trapezoid integral
/// over the grid is exactly 1. Throws DomainError for fewer than two samples,
/// nonpositive samples, or zero bandwidth.
DensityEstimate kde_log(std::span<const double> samples);

inline constexpr int kKdeGridPoints = 512;

}  // namespace tccopula
