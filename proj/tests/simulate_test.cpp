#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "doctest.h"
#include "tccopula/errors.hpp"
#include "tccopula/estimators.hpp"
#include "tccopula/simulate.hpp"

using namespace tccopula;

namespace {

double sample_mean(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_variance(const std::vector<double>& x) {
  const double m = sample_mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

}  // namespace

TEST_CASE("CIR with vanishing vol-of-vol follows the mean ODE") {
  const CirParams p{0.5, 1.5, 1e-8, 0.4};
  const std::vector<double> s2 = simulate_cir(p, SimConfig{100, 1.0, 10, 3});
  const double ode = p.theta + (p.s0 - p.theta) * std::exp(-p.kappa);
  CHECK(std::fabs(s2.back() - ode) <= 1e-4);
  CHECK(s2.front() == p.s0);
}

TEST_CASE("CIR mean at t=1 with the default parameters") {
  const CirParams p;
  std::vector<double> last;
  for (std::uint64_t seed = 0; seed < 10000; ++seed)
    last.push_back(simulate_cir(p, SimConfig{10, 1.0, 10, seed}).back());
  CHECK(std::fabs(sample_mean(last) - 1.5) <= 0.02);
}

TEST_CASE("CIR paths stay positive") {
  // closer to the Feller boundary than the defaults
  const CirParams p{0.5, 1.5, 1.2, 0.05};
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const std::vector<double> s2 = simulate_cir(p, SimConfig{100, 1.0, 10, seed});
    REQUIRE(*std::min_element(s2.begin(), s2.end()) > 0.0);
  }
}

TEST_CASE("scenario lengths and starting values") {
  const SimulatedScenario sc = simulate_scenario(CirParams{}, SimConfig{50, 2.0, 7, 1});
  CHECK(sc.path.values.size() == 101);
  CHECK(sc.true_T.size() == 101);
  CHECK(sc.true_Q.size() == 101);
  CHECK(sc.sigma2.size() == 7 * 100 + 1);
  CHECK(sc.path.values[0] == 0.0);
  CHECK(sc.true_T[0] == 0.0);
  CHECK(sc.true_Q[0] == 0.0);
  CHECK(sc.sigma2[0] == 1.5);
  CHECK_NOTHROW(sc.path.validate());
}

TEST_CASE("true clocks are nondecreasing with bounded increments") {
  const SimConfig cfg{200, 1.0, 10, 5};
  const SimulatedScenario sc = simulate_scenario(CirParams{}, cfg);
  const std::size_t m = 10;
  for (std::size_t i = 0; i + 1 < sc.true_T.size(); ++i) {
    const auto first = sc.sigma2.begin() + static_cast<std::ptrdiff_t>(i * m);
    const double top = *std::max_element(first, first + static_cast<std::ptrdiff_t>(m));
    const double dT = sc.true_T[i + 1] - sc.true_T[i];
    const double dQ = sc.true_Q[i + 1] - sc.true_Q[i];
    CHECK(dT >= 0.0);
    CHECK(dQ >= 0.0);
    CHECK(dT <= top / cfg.n * (1.0 + 1e-12));
    CHECK(dQ <= top * top / cfg.n * (1.0 + 1e-12));
  }
}

TEST_CASE("unit volatility gives a Brownian path") {
  const int n = 10000;
  std::vector<double> rv;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const SimulatedScenario sc = simulate_scenario(ConstantVolatility{1.0}, SimConfig{n, 1.0, 10, seed});
    rv.push_back(realized_variation(sc.path, 1.0));
    if (seed == 0) {
      for (std::size_t i = 0; i < sc.true_T.size(); ++i) {
        REQUIRE(sc.true_T[i] == static_cast<double>(i) / n);
        REQUIRE(sc.true_Q[i] == static_cast<double>(i) / n);
      }
    }
  }
  CHECK(std::fabs(sample_mean(rv) - 1.0) <= 0.02);
  // Var([X]ⁿ₁) = 2/n; the sample variance of 200 draws is within 30% w.h.p.
  CHECK(std::fabs(sample_variance(rv) * n / 2.0 - 1.0) <= 0.3);
}

TEST_CASE("scenarios are reproducible from the seed") {
  const SimConfig cfg{1000, 1.0, 10, 99};
  const SimulatedScenario a = simulate_scenario(CirParams{}, cfg);
  const SimulatedScenario b = simulate_scenario(CirParams{}, cfg);
  CHECK(a.path.values == b.path.values);
  CHECK(a.true_T == b.true_T);
  CHECK(a.true_Q == b.true_Q);
  CHECK(a.sigma2 == b.sigma2);
  const SimulatedScenario c = simulate_scenario(CirParams{}, SimConfig{1000, 1.0, 10, 100});
  CHECK(a.path.values != c.path.values);
}

TEST_CASE("Feller violations are rejected") {
  const CirParams boundary{0.5, 1.0, 1.0, 1.0};
  try {
    boundary.validate();
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("Feller") != std::string::npos);
  }
  CHECK_THROWS_AS(simulate_cir(boundary, SimConfig{}), DomainError);
  CHECK_THROWS_AS(simulate_scenario(CirParams{0.5, 1.5, 2.0, 1.0}, SimConfig{}), DomainError);
  CHECK_THROWS_AS(CirParams({-0.5, 1.5, 1.0, 1.5}).validate(), DomainError);
  CHECK_THROWS_AS(CirParams({0.5, 1.5, 1.0, 0.0}).validate(), DomainError);
  CHECK_THROWS_AS(ConstantVolatility{0.0}.validate(), DomainError);
}

TEST_CASE("simulation config validation") {
  CHECK_THROWS_AS((SimConfig{0, 1.0, 10, 0}).validate(), DomainError);
  CHECK_THROWS_AS((SimConfig{10, 0.0, 10, 0}).validate(), DomainError);
  CHECK_THROWS_AS((SimConfig{10, 1.0, 0, 0}).validate(), DomainError);
  CHECK_THROWS_AS((SimConfig{3, 0.5, 10, 0}).validate(), DomainError);
  CHECK_NOTHROW((SimConfig{4, 0.5, 10, 0}).validate());
  CHECK_NOTHROW((SimConfig{10000, 0.3, 1, 0}).validate());
}

TEST_CASE("volatility and Brownian streams are independent") {
  const SimConfig cfg{100, 1.0, 10, 0};
  const StreamSeeds base = derive_stream_seeds(7);
  CHECK(base.volatility != base.brownian);
  StreamSeeds swapped = base;
  swapped.volatility = derive_stream_seeds(8).volatility;

  DrawLog log_a, log_b;
  const SimulatedScenario a = simulate_scenario(CirParams{}, cfg, base, &log_a);
  const SimulatedScenario b = simulate_scenario(CirParams{}, cfg, swapped, &log_b);
  CHECK(a.sigma2 != b.sigma2);
  CHECK(log_a.brownian.size() == 1000);
  CHECK(log_a.brownian == log_b.brownian);
  CHECK(a.path.values != b.path.values);

  // and the master seed reaches both streams
  const SimConfig seeded{100, 1.0, 10, 7};
  DrawLog log_c;
  const SimulatedScenario c = simulate_scenario(CirParams{}, seeded, &log_c);
  CHECK(c.sigma2 == a.sigma2);
  CHECK(log_c.brownian == log_a.brownian);
}

TEST_CASE("realized variation tracks the true clock") {
  const int n = 10000;
  const double times[] = {0.3, 0.7, 1.0};
  double abs_err[3] = {0, 0, 0};
  double quart[3] = {0, 0, 0};
  const int scenarios = 200;
  for (int r = 0; r < scenarios; ++r) {
    const SimulatedScenario sc =
        simulate_scenario(CirParams{}, SimConfig{n, 1.0, 10, static_cast<std::uint64_t>(300 + r)});
    const PreparedPath pp(sc.path);
    for (int k = 0; k < 3; ++k) {
      abs_err[k] += std::fabs(pp.realized_variation(times[k]) - sc.true_time_change(times[k]));
      quart[k] += sc.true_quarticity(times[k]);
    }
  }
  for (int k = 0; k < 3; ++k) {
    const double bound = 3.0 * std::sqrt(2.0 * quart[k] / scenarios / n);
    CHECK(abs_err[k] / scenarios <= bound);
  }
}

TEST_CASE("true clock lookup uses the grid rule") {
  const SimulatedScenario sc = simulate_scenario(ConstantVolatility{2.0}, SimConfig{10, 1.0, 3, 0});
  CHECK(sc.true_time_change(0.3) == sc.true_T[3]);
  CHECK(sc.true_time_change(0.349) == sc.true_T[3]);
  CHECK(sc.true_quarticity(1.0) == doctest::Approx(4.0));
  CHECK_THROWS_AS(sc.true_time_change(1.1), DomainError);
  CHECK_THROWS_AS(sc.true_time_change(-0.1), DomainError);
}
