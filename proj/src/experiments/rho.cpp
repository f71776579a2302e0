#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tccopula/errors.hpp"
#include "tccopula/experiments.hpp"

namespace tccopula {

namespace {

thread_local std::vector<double> tl_row_a;
thread_local std::vector<double> tl_row_b;

}  // namespace

SupNormGrid::SupNormGrid(std::vector<double> times, int uv_points, KernelConfig cfg)
    : times_(std::move(times)), profile_(unit_grid(uv_points), cfg) {
  for (double t : times_)
    if (!(std::isfinite(t) && t >= 0.0)) throw DomainError("SupNormGrid: times must be finite and >= 0");
}

SupNormResult SupNormGrid::distance(std::span<const double> clock_a, std::span<const double> clock_b,
                                    bool exploit_symmetry) const {
  const std::size_t m = times_.size();
  if (clock_a.size() != m || clock_b.size() != m)
    throw DomainError("SupNormGrid::distance: clock length must match the time grid");

  const std::vector<double>& grid = profile_.grid();
  const std::size_t g = grid.size();
  std::vector<double>& ra = tl_row_a;
  std::vector<double>& rb = tl_row_b;
  ra.resize(g);
  rb.resize(g);

  SupNormResult best;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = exploit_symmetry ? i : 0; j < m; ++j) {
      // i == j is the diagonal for both clocks, where both fields equal min(u,v)
      if (i == j) continue;
      const TimePair pa{clock_a[i], clock_a[j]};
      const TimePair pb{clock_b[i], clock_b[j]};
      // v = 0 and v = 1 are exact for both fields
      for (std::size_t k = 1; k + 1 < g; ++k) {
        const double v = grid[k];
        profile_.psi(pa, v, ra);
        profile_.psi(pb, v, rb);
        for (std::size_t l = 0; l < g; ++l) {
          const double d = std::fabs(ra[l] - rb[l]);
          if (d > best.value) best = {d, times_[i], times_[j], grid[l], v};
        }
      }
    }
  }
  return best;
}

ExperimentReport run_rho(const RhoSpec& spec) {
  spec.validate();
  const std::vector<double> times = time_grid(spec.tau, spec.setup.horizon, spec.st_step);
  const SupNormGrid sup(times, spec.uv_grid, spec.kernel);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  ExperimentReport report;
  report.kind = ExperimentKind::rho;
  report.metadata["spec"] = to_json(spec);
  report.metadata["version"] = kVersion;
  report.metadata["seed"] = spec.seed;
  report.metadata["time_grid"] = times;
  nlohmann::json per_n = nlohmann::json::array();

  std::ostringstream summary;
  summary << "rho: median";

  for (int n : spec.n_list) {
    const auto reps = static_cast<std::size_t>(spec.replications);
    std::vector<SupNormResult> results(reps);
    std::vector<char> failed(reps, 0);
    std::vector<std::string> messages(reps);

    parallel_for(reps, spec.workers, [&](std::size_t r) {
      const SimConfig cfg{n, spec.setup.horizon, spec.setup.substeps, replication_seed(spec.seed, n, r)};
      const SimulatedScenario sc = simulate_scenario(spec.setup.model, cfg);
      const PreparedPath path(sc.path);
      std::vector<double> est(times.size());
      std::vector<double> truth(times.size());
      for (std::size_t k = 0; k < times.size(); ++k) {
        est[k] = path.realized_variation(times[k]);
        truth[k] = sc.true_time_change(times[k]);
      }
      try {
        results[r] = sup.distance(est, truth);
      } catch (const ConvergenceError& e) {
        failed[r] = 1;
        messages[r] = e.what();
      }
    });

    DataTable samples;
    samples.name = "rho_samples_n" + std::to_string(n);
    samples.headers = {"replication", "rho", "log_rho", "s_at", "t_at", "u_at", "v_at"};
    samples.columns.assign(samples.headers.size(), {});
    std::vector<double> valid;
    std::size_t failures = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      const SupNormResult& res = results[r];
      const bool ok = !failed[r];
      failures += failed[r] ? 1 : 0;
      const double rho = ok ? res.value : nan;
      samples.columns[0].push_back(static_cast<double>(r));
      samples.columns[1].push_back(rho);
      samples.columns[2].push_back(ok && rho > 0.0 ? std::log(rho) : nan);
      samples.columns[3].push_back(ok ? res.s : nan);
      samples.columns[4].push_back(ok ? res.t : nan);
      samples.columns[5].push_back(ok ? res.u : nan);
      samples.columns[6].push_back(ok ? res.v : nan);
      if (ok && rho > 0.0) valid.push_back(rho);
    }

    nlohmann::json entry;
    entry["n"] = n;
    entry["failures"] = failures;
    entry["log_inv_sqrt_n"] = std::log(1.0 / std::sqrt(static_cast<double>(n)));
    entry["valid"] = valid.size();
    if (!valid.empty()) {
      entry["median"] = median(valid);
      entry["mean"] = mean(valid);
    }
    if (failures) entry["first_failure"] = *std::find_if(messages.begin(), messages.end(),
                                                         [](const std::string& m) { return !m.empty(); });

    DataTable kde;
    kde.name = "rho_kde_n" + std::to_string(n);
    kde.headers = {"log_rho", "density"};
    kde.columns.assign(2, {});
    if (valid.size() >= 2) {
      try {
        DensityEstimate d = kde_log(valid);
        kde.columns[0] = std::move(d.grid);
        kde.columns[1] = std::move(d.density);
        entry["bandwidth"] = d.bandwidth;
      } catch (const DomainError& e) {
        entry["kde_error"] = e.what();
      }
    }
    per_n.push_back(entry);
    summary << " n=" << n << ": " << (valid.empty() ? std::string("nan") : format_real(median(valid)));
    report.tables.push_back(std::move(samples));
    report.tables.push_back(std::move(kde));
  }
  report.metadata["results"] = per_n;
  report.summary = summary.str();
  return report;
}

}  // namespace tccopula
