#include <cmath>
#include <random>
#include <sstream>

#include "tccopula/errors.hpp"
#include "tccopula/simulate.hpp"

namespace tccopula {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

void fill_constant(std::vector<double>& sigma2, std::size_t count, double level) {
  sigma2.assign(count, level);
}

}  // namespace

void CirParams::validate() const {
  if (!(kappa > 0.0 && theta > 0.0 && nu > 0.0 && s0 > 0.0))
    throw DomainError("CIR parameters kappa, theta, nu and s0 must all be > 0");
  if (!(2.0 * kappa * theta > nu * nu)) {
    std::ostringstream os;
    os.precision(17);
    os << "Feller condition 2κθ>ν² violated: 2*kappa*theta = " << 2.0 * kappa * theta
       << " is not greater than nu^2 = " << nu * nu;
    throw DomainError(os.str());
  }
}

void ConstantVolatility::validate() const {
  if (!(std::isfinite(sigma2) && sigma2 > 0.0))
    throw DomainError("constant volatility level sigma2 must be > 0");
}

void validate_model(const VolatilityModel& model) {
  std::visit([](const auto& m) { m.validate(); }, model);
}

std::size_t SimConfig::intervals() const noexcept {
  return static_cast<std::size_t>(std::llround(static_cast<double>(n) * horizon));
}

double SimConfig::substep() const noexcept { return 1.0 / (static_cast<double>(n) * substeps); }

void SimConfig::validate() const {
  if (n < 1) throw DomainError("SimConfig: n must be >= 1");
  if (substeps < 1) throw DomainError("SimConfig: substeps must be >= 1");
  if (!(std::isfinite(horizon) && horizon > 0.0)) throw DomainError("SimConfig: horizon must be > 0");
  const double count = static_cast<double>(n) * horizon;
  if (std::llround(count) < 1 || std::fabs(count - std::round(count)) > 1e-9 * count)
    throw DomainError("SimConfig: n*horizon must be a positive whole number of intervals");
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  std::uint64_t z = x + kGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

StreamSeeds derive_stream_seeds(std::uint64_t master) noexcept {
  return {splitmix64(master), splitmix64(master + kGolden)};
}

double SimulatedScenario::true_time_change(double t) const {
  if (!(t >= 0.0 && t <= path.horizon + 1e-9 / path.n))
    throw DomainError("true_time_change: time outside the observation window");
  return true_T[std::min(grid_index(t, path.n), true_T.size() - 1)];
}

double SimulatedScenario::true_quarticity(double t) const {
  if (!(t >= 0.0 && t <= path.horizon + 1e-9 / path.n))
    throw DomainError("true_quarticity: time outside the observation window");
  return true_Q[std::min(grid_index(t, path.n), true_Q.size() - 1)];
}

std::vector<double> simulate_cir(const CirParams& params, const SimConfig& cfg) {
  return simulate_cir(params, cfg, derive_stream_seeds(cfg.seed).volatility);
}

std::vector<double> simulate_cir(const CirParams& params, const SimConfig& cfg, std::uint64_t seed) {
  params.validate();
  cfg.validate();
  const std::size_t steps = cfg.intervals() * static_cast<std::size_t>(cfg.substeps);
  const double dt = cfg.substep();

  const double decay = std::exp(-params.kappa * dt);
  const double scale = params.nu * params.nu * -std::expm1(-params.kappa * dt) / (4.0 * params.kappa);
  const double dof = 4.0 * params.kappa * params.theta / (params.nu * params.nu);

  // Feller gives dof > 2, so χ′²_d(λ) = (Z + √λ)² + χ²_{d−1} with χ²_{d−1} = 2·Gamma((d−1)/2).
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::gamma_distribution<double> gamma(0.5 * (dof - 1.0), 1.0);

  std::vector<double> sigma2(steps + 1);
  sigma2[0] = params.s0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double noncentrality = sigma2[k] * decay / scale;
    const double shifted = normal(engine) + std::sqrt(noncentrality);
    const double chi2 = shifted * shifted + 2.0 * gamma(engine);
    sigma2[k + 1] = scale * chi2;
  }
  return sigma2;
}

SimulatedScenario simulate_scenario(const VolatilityModel& model, const SimConfig& cfg,
                                    DrawLog* log) {
  return simulate_scenario(model, cfg, derive_stream_seeds(cfg.seed), log);
}

SimulatedScenario simulate_scenario(const VolatilityModel& model, const SimConfig& cfg,
                                    const StreamSeeds& seeds, DrawLog* log) {
  validate_model(model);
  cfg.validate();
  const std::size_t intervals = cfg.intervals();
  const auto m = static_cast<std::size_t>(cfg.substeps);

  SimulatedScenario sc;
  if (const auto* cir = std::get_if<CirParams>(&model))
    sc.sigma2 = simulate_cir(*cir, cfg, seeds.volatility);
  else
    fill_constant(sc.sigma2, intervals * m + 1, std::get<ConstantVolatility>(model).sigma2);

  const double dt = cfg.substep();
  const double sqrt_dt = std::sqrt(dt);
  std::mt19937_64 engine(seeds.brownian);
  std::normal_distribution<double> normal(0.0, 1.0);
  if (log) {
    log->brownian.clear();
    log->brownian.reserve(intervals * m);
  }

  sc.path.n = cfg.n;
  sc.path.horizon = cfg.horizon;
  sc.path.values.resize(intervals + 1);
  sc.true_T.resize(intervals + 1);
  sc.true_Q.resize(intervals + 1);
  sc.path.values[0] = 0.0;
  sc.true_T[0] = 0.0;
  sc.true_Q[0] = 0.0;

  double x = 0.0;
  double big_t = 0.0;
  double big_q = 0.0;
  for (std::size_t i = 0; i < intervals; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double s2 = sc.sigma2[i * m + j];
      const double xi = normal(engine);
      if (log) log->brownian.push_back(xi);
      x += std::sqrt(s2) * sqrt_dt * xi;
      big_t += s2 * dt;
      big_q += s2 * s2 * dt;
    }
    sc.path.values[i + 1] = x;
    sc.true_T[i + 1] = big_t;
    sc.true_Q[i + 1] = big_q;
  }
  // A constant level has an exact Riemann sum; accumulating it would drift by rounding.
  if (const auto* flat = std::get_if<ConstantVolatility>(&model)) {
    for (std::size_t i = 0; i <= intervals; ++i) {
      const double time = static_cast<double>(i) / cfg.n;
      sc.true_T[i] = flat->sigma2 * time;
      sc.true_Q[i] = flat->sigma2 * flat->sigma2 * time;
    }
  }
  // The path's own intervals() uses the guarded floor; keep the two consistent.
  if (sc.path.intervals() != intervals)
    throw DomainError("SimConfig: n*horizon does not map back onto the observation grid");
  return sc;
}

}  // namespace tccopula
