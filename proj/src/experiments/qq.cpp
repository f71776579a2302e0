#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tccopula/errors.hpp"
#include "tccopula/experiments.hpp"

namespace tccopula {

namespace {

enum class Outcome : char { ok, near_diagonal, numerical };

struct Replication {
  Outcome outcome = Outcome::ok;
  double c_true = 0.0;
  CopulaEstimate est{};
};

}  // namespace

ExperimentReport run_qq(const QqSpec& spec) {
  spec.validate();
  const auto reps = static_cast<std::size_t>(spec.replications);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const CopulaQuery query{spec.s, spec.t, spec.u, spec.v};

  std::vector<Replication> results(reps);
  parallel_for(reps, spec.workers, [&](std::size_t r) {
    const SimConfig cfg{spec.n, spec.setup.horizon, spec.setup.substeps,
                        replication_seed(spec.seed, spec.n, r)};
    const SimulatedScenario sc = simulate_scenario(spec.setup.model, cfg);
    const PreparedPath path(sc.path);
    Replication& out = results[r];
    try {
      out.c_true = psi({sc.true_time_change(spec.s), sc.true_time_change(spec.t)}, {spec.u, spec.v},
                       spec.kernel);
      out.est = confidence_interval(path, query, spec.level, spec.kernel);
      if (!(out.est.v_hat > 0.0)) out.outcome = Outcome::near_diagonal;
    } catch (const NearDiagonalError&) {
      out.outcome = Outcome::near_diagonal;
    } catch (const ConvergenceError&) {
      out.outcome = Outcome::numerical;
    }
  });

  DataTable table;
  table.name = "replications";
  table.headers = {"replication", "valid",  "c_true", "c_hat", "v_hat",
                   "ci_lo",       "ci_hi", "statistic", "covered"};
  table.columns.assign(table.headers.size(), {});

  const double root_n = std::sqrt(static_cast<double>(spec.n));
  std::vector<double> stats, scaled_err, v_hats;
  std::size_t dropped = 0, failed = 0, covered = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    const Replication& rep = results[r];
    const bool ok = rep.outcome == Outcome::ok;
    dropped += rep.outcome == Outcome::near_diagonal ? 1 : 0;
    failed += rep.outcome == Outcome::numerical ? 1 : 0;
    const double stat = ok ? root_n * (rep.est.c_hat - rep.c_true) / std::sqrt(rep.est.v_hat) : nan;
    const bool hit = ok && rep.est.ci_lo <= rep.c_true && rep.c_true <= rep.est.ci_hi;
    table.columns[0].push_back(static_cast<double>(r));
    table.columns[1].push_back(ok ? 1.0 : 0.0);
    table.columns[2].push_back(rep.outcome == Outcome::numerical ? nan : rep.c_true);
    table.columns[3].push_back(ok ? rep.est.c_hat : nan);
    table.columns[4].push_back(ok ? rep.est.v_hat : nan);
    table.columns[5].push_back(ok ? rep.est.ci_lo : nan);
    table.columns[6].push_back(ok ? rep.est.ci_hi : nan);
    table.columns[7].push_back(stat);
    table.columns[8].push_back(ok ? (hit ? 1.0 : 0.0) : nan);
    if (!ok) continue;
    stats.push_back(stat);
    scaled_err.push_back(root_n * (rep.est.c_hat - rep.c_true));
    v_hats.push_back(rep.est.v_hat);
    covered += hit ? 1 : 0;
  }

  DataTable qq;
  qq.name = "qq";
  qq.headers = {"rank", "statistic", "normal_quantile"};
  std::vector<double> sorted = stats;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  std::vector<double> rank(m), nq(m);
  for (std::size_t k = 0; k < m; ++k) {
    rank[k] = static_cast<double>(k + 1);
    nq[k] = std_normal_quantile((static_cast<double>(k) + 0.5) / static_cast<double>(m));
  }
  qq.columns = {std::move(rank), sorted, std::move(nq)};

  ExperimentReport report;
  report.kind = ExperimentKind::qq;
  report.metadata["spec"] = to_json(spec);
  report.metadata["version"] = kVersion;
  report.metadata["seed"] = spec.seed;
  nlohmann::json res;
  res["valid"] = m;
  res["dropped_near_diagonal"] = dropped;
  res["failed_numerical"] = failed;
  std::ostringstream summary;
  summary << "qq: valid=" << m << " dropped=" << dropped + failed;
  if (m > 0) {
    const double ks = ks_distance_normal(stats);
    const double coverage = static_cast<double>(covered) / static_cast<double>(m);
    res["ks_distance"] = ks;
    res["coverage"] = coverage;
    res["mean_statistic"] = mean(stats);
    res["mean_v_hat"] = mean(v_hats);
    summary << " ks=" << format_real(ks) << " coverage=" << format_real(coverage);
    if (m >= 2) {
      const double emp = sample_variance(scaled_err);
      res["empirical_variance"] = emp;
      res["variance_ratio"] = emp / mean(v_hats);
      summary << " var_ratio=" << format_real(emp / mean(v_hats));
    }
  }
  report.metadata["results"] = res;
  report.summary = summary.str();
  report.tables.push_back(std::move(qq));
  report.tables.push_back(std::move(table));
  return report;
}

}  // namespace tccopula
