#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tccopula/errors.hpp"
#include "tccopula/experiments.hpp"

namespace tccopula {

namespace {

constexpr std::size_t kBlock = 64;

// One replication on the full (u,v) grid, u-major.
struct Surface {
  std::vector<double> c_true, c_hat, v_hat, ci_lo, ci_hi;
  std::vector<char> valid;
};

Surface evaluate_surface(const ContourSpec& spec, const UGridProfile& profile, int n, std::size_t rep) {
  const SimConfig cfg{n, spec.setup.horizon, spec.setup.substeps, replication_seed(spec.seed, n, rep)};
  const SimulatedScenario sc = simulate_scenario(spec.setup.model, cfg);
  const PreparedPath path(sc.path);

  const std::vector<double>& grid = profile.grid();
  const std::size_t g = grid.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Surface out;
  for (auto* col : {&out.c_true, &out.c_hat, &out.v_hat, &out.ci_lo, &out.ci_hi}) col->assign(g * g, nan);
  out.valid.assign(g * g, 0);

  const double rv_s = path.realized_variation(spec.s);
  const double rv_t = path.realized_variation(spec.t);
  const double q_s = path.quarticity(spec.s);
  const double q_t = path.quarticity(spec.t);
  const TimePair truth{sc.true_time_change(spec.s), sc.true_time_change(spec.t)};
  const TimePair est{std::min(rv_s, rv_t), std::max(rv_s, rv_t)};
  const bool has_gradient = est.s > 0.0 && est.t - est.s > spec.kernel.diag_rel_tol * est.t;

  std::vector<double> ct(g), ch(g), dt(g), ds(g);
  for (std::size_t j = 0; j < g; ++j) {
    const double v = grid[j];
    const bool v_edge = v == 0.0 || v == 1.0;
    try {
      profile.psi(truth, v, ct);
      profile.psi(est, v, ch);
      if (!v_edge && has_gradient) profile.grad_psi(est, v, dt, ds);
    } catch (const ConvergenceError&) {
      continue;
    }
    for (std::size_t i = 0; i < g; ++i) {
      const double u = grid[i];
      const bool edge = v_edge || u == 0.0 || u == 1.0;
      if (!edge && !has_gradient) continue;
      const double var = edge ? 0.0 : variance_from_gradient({dt[i], ds[i]}, q_s, q_t);
      const CopulaEstimate ci = studentized_interval(ch[i], var, n, u, v, spec.level);
      const std::size_t cell = i * g + j;
      out.c_true[cell] = ct[i];
      out.c_hat[cell] = ch[i];
      out.v_hat[cell] = var;
      out.ci_lo[cell] = ci.ci_lo;
      out.ci_hi[cell] = ci.ci_hi;
      out.valid[cell] = 1;
    }
  }
  return out;
}

}  // namespace

ExperimentReport run_contour(const ContourSpec& spec) {
  spec.validate();
  const UGridProfile profile(unit_grid(spec.uv_grid), spec.kernel);
  const std::vector<double>& grid = profile.grid();
  const std::size_t g = grid.size();
  const std::size_t cells = g * g;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  ExperimentReport report;
  report.kind = ExperimentKind::contour;
  report.metadata["spec"] = to_json(spec);
  report.metadata["version"] = kVersion;
  report.metadata["seed"] = spec.seed;
  nlohmann::json per_n = nlohmann::json::array();
  std::ostringstream summary;
  summary << "contour: mean interior CI width";

  for (int n : spec.n_list) {
    const auto reps = static_cast<std::size_t>(spec.replications);
    std::vector<double> covered(cells, 0.0), width(cells, 0.0), valid(cells, 0.0);
    Surface first;

    for (std::size_t start = 0; start < reps; start += kBlock) {
      const std::size_t count = std::min(kBlock, reps - start);
      std::vector<Surface> block(count);
      parallel_for(count, spec.workers,
                   [&](std::size_t k) { block[k] = evaluate_surface(spec, profile, n, start + k); });
      for (std::size_t k = 0; k < count; ++k) {
        const Surface& s = block[k];
        for (std::size_t c = 0; c < cells; ++c) {
          if (!s.valid[c]) continue;
          valid[c] += 1.0;
          width[c] += s.ci_hi[c] - s.ci_lo[c];
          if (s.ci_lo[c] <= s.c_true[c] && s.c_true[c] <= s.ci_hi[c]) covered[c] += 1.0;
        }
      }
      if (start == 0) first = std::move(block[0]);
    }

    DataTable contour;
    contour.name = "contour_n" + std::to_string(n);
    contour.headers = {"u", "v", "c_true", "c_hat", "v_hat", "ci_lo", "ci_hi"};
    DataTable coverage;
    coverage.name = "coverage_n" + std::to_string(n);
    coverage.headers = {"u", "v", "coverage", "mean_width", "valid"};
    std::vector<double> us(cells), vs(cells), cov(cells), mw(cells);
    double width_sum = 0.0;
    std::size_t interior = 0;
    std::size_t missing = 0;
    for (std::size_t i = 0; i < g; ++i) {
      for (std::size_t j = 0; j < g; ++j) {
        const std::size_t c = i * g + j;
        us[c] = grid[i];
        vs[c] = grid[j];
        cov[c] = valid[c] > 0.0 ? covered[c] / valid[c] : nan;
        mw[c] = valid[c] > 0.0 ? width[c] / valid[c] : nan;
        missing += static_cast<std::size_t>(static_cast<double>(reps) - valid[c]);
        const bool edge = i == 0 || j == 0 || i + 1 == g || j + 1 == g;
        if (!edge && valid[c] > 0.0) {
          width_sum += mw[c];
          ++interior;
        }
      }
    }
    contour.columns = {us, vs, first.c_true, first.c_hat, first.v_hat, first.ci_lo, first.ci_hi};
    coverage.columns = {std::move(us), std::move(vs), std::move(cov), std::move(mw), valid};

    const double mean_width = interior ? width_sum / static_cast<double>(interior) : nan;
    nlohmann::json entry;
    entry["n"] = n;
    entry["missing_cells"] = missing;
    if (interior) entry["mean_interior_width"] = mean_width;
    per_n.push_back(entry);
    summary << " n=" << n << ": " << format_real(mean_width);

    report.tables.push_back(std::move(contour));
    report.tables.push_back(std::move(coverage));
  }
  report.metadata["results"] = per_n;
  report.summary = summary.str();
  return report;
}

}  // namespace tccopula
