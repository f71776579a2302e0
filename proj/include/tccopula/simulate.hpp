#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "tccopula/estimators.hpp"

namespace tccopula {

/// dσ²_t = κ(θ − σ²_t)dt + ν√σ²_t dW_t, σ²_0 = s0.
struct CirParams {
  double kappa = 0.5;
  double theta = 1.5;
  double nu = 1.0;
  double s0 = 1.5;

  /// Throws DomainError unless all parameters are positive and the Feller
  /// condition 2κθ > ν² holds strictly.
  void validate() const;
};

/// σ² held at a fixed level; X is then a scaled Brownian motion.
struct ConstantVolatility {
  double sigma2 = 1.0;

  void validate() const;
};

using VolatilityModel = std::variant<CirParams, ConstantVolatility>;

void validate_model(const VolatilityModel& model);

struct SimConfig {
  int n = 10000;         ///< observations per unit time
  double horizon = 1.0;  ///< simulate on [0, horizon]
  int substeps = 10;     ///< volatility sub-steps per observation interval
  std::uint64_t seed = 0;

  std::size_t intervals() const noexcept;
  double substep() const noexcept;
  /// Throws DomainError unless n·horizon is a positive whole number.
  void validate() const;
};

/// Seeds of the two generator streams. The volatility driver and the
/// Brownian motion driving X are independent.
struct StreamSeeds {
  std::uint64_t volatility = 0;
  std::uint64_t brownian = 0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Derives both stream seeds from a master seed by fixed stream offsets.
StreamSeeds derive_stream_seeds(std::uint64_t master) noexcept;

struct SimulatedScenario {
  SampledPath path;
  std::vector<double> true_T;  ///< ∫₀^{i/n} σ², left Riemann sums on the sub-grid
  std::vector<double> true_Q;  ///< ∫₀^{i/n} σ⁴
  std::vector<double> sigma2;  ///< on the sub-grid, substeps·n·horizon + 1 points

  /// True clock value at a grid time, using the same index rule as the
  /// estimators.
  double true_time_change(double t) const;
  double true_quarticity(double t) const;
};

/// Optional record of the raw standard-normal draws driving X.
struct DrawLog {
  std::vector<double> brownian;
};

/// σ² on the sub-grid from the exact CIR transition: σ²_{k+1} = c·χ′²_d(λ)
/// with c = ν²(1−e^{−κΔ})/(4κ), d = 4κθ/ν², λ = σ²_k e^{−κΔ}/c.
std::vector<double> simulate_cir(const CirParams& params, const SimConfig& cfg);
std::vector<double> simulate_cir(const CirParams& params, const SimConfig& cfg, std::uint64_t seed);

/// X on the observation grid with X increments Σ σ_left √Δτ ξ over
/// sub-steps, together with the true time change and quarticity.
SimulatedScenario simulate_scenario(const VolatilityModel& model, const SimConfig& cfg,
                                    DrawLog* log = nullptr);
SimulatedScenario simulate_scenario(const VolatilityModel& model, const SimConfig& cfg,
                                    const StreamSeeds& seeds, DrawLog* log = nullptr);

}  // namespace tccopula
