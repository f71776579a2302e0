#include <algorithm>
#include <cmath>
#include <numeric>

#include "tccopula/errors.hpp"
#include "tccopula/gaussmath.hpp"
#include "tccopula/statistics.hpp"

namespace tccopula {

double mean(std::span<const double> x) {
  if (x.empty()) throw DomainError("mean: empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) throw DomainError("sample_variance: need at least two values");
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

double quantile(std::vector<double> x, double p) {
  if (x.empty()) throw DomainError("quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile: p must lie in [0,1]");
  std::sort(x.begin(), x.end());
  const double h = (static_cast<double>(x.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

double median(std::vector<double> x) { return quantile(std::move(x), 0.5); }

double ks_distance_normal(std::vector<double> x) {
  if (x.empty()) throw DomainError("ks_distance_normal: empty sample");
  std::sort(x.begin(), x.end());
  const auto m = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double f = std_normal_cdf(x[k]);
    d = std::max({d, static_cast<double>(k + 1) / m - f, f - static_cast<double>(k) / m});
  }
  return d;
}

DensityEstimate kde_log(std::span<const double> samples) {
  if (samples.size() < 2) throw DomainError("kde_log: need at least two samples");
  std::vector<double> logs;
  logs.reserve(samples.size());
  for (double s : samples) {
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("kde_log: samples must be positive and finite");
    logs.push_back(std::log(s));
  }

  const double sd = std::sqrt(sample_variance(logs));
  const double iqr = quantile(logs, 0.75) - quantile(logs, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = std::max(sd, iqr / 1.34);
  if (!(spread > 0.0)) throw DomainError("kde_log: zero bandwidth (samples have no spread)");

  const auto m = static_cast<double>(logs.size());
  DensityEstimate out;
  out.bandwidth = 0.9 * spread * std::pow(m, -0.2);
  const double h = out.bandwidth;
  const auto [mn, mx] = std::minmax_element(logs.begin(), logs.end());
  const double lo = *mn - 3.0 * h;
  const double hi = *mx + 3.0 * h;
  const double step = (hi - lo) / (kKdeGridPoints - 1);

  out.grid.resize(kKdeGridPoints);
  out.density.resize(kKdeGridPoints);
  for (int g = 0; g < kKdeGridPoints; ++g) {
    const double x = lo + step * g;
    double sum = 0.0;
    for (double l : logs) sum += std_normal_pdf((x - l) / h);
    out.grid[g] = x;
    out.density[g] = sum / (m * h);
  }

  double mass = 0.0;
  for (int g = 0; g + 1 < kKdeGridPoints; ++g)
    mass += 0.5 * step * (out.density[g] + out.density[g + 1]);
  for (double& d : out.density) d /= mass;
  return out;
}

}  // namespace tccopula
