#include <cmath>
#include <limits>
#include <ostream>

#include "tccopula/cli.hpp"
#include "tccopula/experiments.hpp"

namespace tccopula::cli {

namespace {

ScenarioSetup setup_from(const RunOptions& o) {
  ScenarioSetup setup;
  if (o.vol == "cir") {
    setup.model = CirParams{o.kappa, o.theta, o.nu, o.s0};
  } else if (o.vol == "constant") {
    setup.model = ConstantVolatility{o.sigma2};
  } else {
    throw DomainError("unknown volatility model '" + o.vol + "' (expected cir or constant)");
  }
  setup.horizon = o.horizon;
  setup.substeps = o.substeps;
  setup.validate();
  return setup;
}

KernelConfig kernel_from(const RunOptions& o) {
  KernelConfig k;
  k.diag_rel_tol = o.diag_rel_tol;
  k.quad.abs_tol = o.abs_tol;
  k.quad.max_subdivisions = o.max_subdivisions;
  k.validate();
  return k;
}

nlohmann::json base_metadata(const RunOptions& o) {
  nlohmann::json meta;
  meta["config"] = to_json(o);
  meta["version"] = kVersion;
  meta["seed"] = o.seed;
  return meta;
}

void list_files(const RunOptions& o, const std::vector<std::string>& files, std::ostream& out) {
  if (!o.verbose) return;
  for (const std::string& f : files) out << "wrote " << f << '\n';
}

}  // namespace

void RunOptions::resolve() {
  if (n < 0) n = 10000;
  if (replications < 0) {
    if (command == "contour") replications = 1;
    else if (command == "rho") replications = 500;
    else replications = 1000;
  }
  if (n_list.empty()) {
    if (command == "rho") n_list = {100, 1000, 10000};
    else n_list = {100, 10000};
  }
}

nlohmann::json to_json(const RunOptions& o) {
  return {{"command", o.command},
          {"out", o.out},
          {"seed", o.seed},
          {"workers", o.workers},
          {"verbose", o.verbose},
          {"vol", o.vol},
          {"kappa", o.kappa},
          {"theta", o.theta},
          {"nu", o.nu},
          {"s0", o.s0},
          {"sigma2", o.sigma2},
          {"horizon", o.horizon},
          {"substeps", o.substeps},
          {"n", o.n},
          {"n_list", o.n_list},
          {"replications", o.replications},
          {"s", o.s},
          {"t", o.t},
          {"u", o.u},
          {"v", o.v},
          {"level", o.level},
          {"uv_grid", o.uv_grid},
          {"tau", o.tau},
          {"st_step", o.st_step},
          {"input", o.input},
          {"queries", o.queries},
          {"abs_tol", o.abs_tol},
          {"max_subdivisions", o.max_subdivisions},
          {"diag_rel_tol", o.diag_rel_tol}};
}

int cmd_simulate(const RunOptions& o, std::ostream& out) {
  const ScenarioSetup setup = setup_from(o);
  const SimConfig cfg{o.n, setup.horizon, setup.substeps, o.seed};
  cfg.validate();
  const SimulatedScenario sc = simulate_scenario(setup.model, cfg);

  DataTable table;
  table.name = "scenario";
  table.headers = {"time", "X", "true_T", "true_Q"};
  std::vector<double> time(sc.path.values.size());
  for (std::size_t i = 0; i < time.size(); ++i) time[i] = static_cast<double>(i) / o.n;
  table.columns = {std::move(time), sc.path.values, sc.true_T, sc.true_Q};

  nlohmann::json meta = base_metadata(o);
  meta["rows"] = table.rows();
  meta["setup"] = to_json(setup);
  const auto files = write_bundle({table}, "scenario.json", meta, o.out);
  list_files(o, files, out);
  out << "simulate: " << table.rows() << " rows, [X]_T=" << format_real(realized_variation(sc.path, setup.horizon))
      << " true_T=" << format_real(sc.true_T.back()) << '\n';
  return kOk;
}

int cmd_estimate(const RunOptions& o, std::ostream& out) {
  const KernelConfig kernel = kernel_from(o);
  if (o.input.empty()) throw DomainError("estimate requires --input");
  if (!(o.level > 0.0 && o.level < 1.0)) throw DomainError("level must lie in (0,1)");

  std::vector<CopulaQuery> queries;
  std::vector<double> levels;
  if (o.queries.empty()) {
    queries.push_back({o.s, o.t, o.u, o.v});
    levels.push_back(o.level);
  } else {
    const CsvData q = read_csv(o.queries);
    const std::size_t cs = q.index("s", o.queries), ct = q.index("t", o.queries);
    const std::size_t cu = q.index("u", o.queries), cv = q.index("v", o.queries);
    std::size_t cl = q.headers.size();
    for (std::size_t i = 0; i < q.headers.size(); ++i)
      if (q.headers[i] == "level") cl = i;
    for (std::size_t r = 0; r < q.rows(); ++r) {
      queries.push_back({q.columns[cs][r], q.columns[ct][r], q.columns[cu][r], q.columns[cv][r]});
      levels.push_back(cl < q.headers.size() ? q.columns[cl][r] : o.level);
    }
  }

  const CsvData in = read_csv(o.input);
  const PreparedPath path(path_from_columns(in.columns[in.index("time", o.input)],
                                            in.columns[in.index("X", o.input)]));

  // every query is checked before any output is produced
  for (std::size_t k = 0; k < queries.size(); ++k) {
    try {
      queries[k].validate(path.horizon());
    } catch (const DomainError& e) {
      throw DomainError("query " + std::to_string(k + 1) + ": " + e.what());
    }
    if (!(levels[k] > 0.0 && levels[k] < 1.0))
      throw DomainError("query " + std::to_string(k + 1) + ": level must lie in (0,1)");
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  DataTable table;
  table.name = "estimates";
  table.headers = {"s", "t", "u", "v", "level", "c_hat", "v_hat", "ci_lo", "ci_hi", "rv_s", "rv_t", "status"};
  table.columns.assign(table.headers.size(), {});
  std::size_t near_diagonal = 0;
  for (std::size_t k = 0; k < queries.size(); ++k) {
    const CopulaQuery& q = queries[k];
    CopulaEstimate e;
    double status = 0.0;
    const bool interior = q.u > 0.0 && q.u < 1.0 && q.v > 0.0 && q.v < 1.0;
    try {
      // the variance is undefined at s = t
      if (interior && q.s == q.t) throw NearDiagonalError("s = t");
      e = confidence_interval(path, q, levels[k], kernel);
    } catch (const NearDiagonalError&) {
      e.c_hat = copula_estimate(path, q, kernel);
      e.v_hat = e.ci_lo = e.ci_hi = nan;
      e.rv_s = path.realized_variation(q.s);
      e.rv_t = path.realized_variation(q.t);
      status = 1.0;
      ++near_diagonal;
    }
    const double row[] = {q.s, q.t, q.u, q.v, levels[k], e.c_hat, e.v_hat, e.ci_lo, e.ci_hi, e.rv_s, e.rv_t, status};
    for (std::size_t c = 0; c < table.columns.size(); ++c) table.columns[c].push_back(row[c]);
  }

  nlohmann::json meta = base_metadata(o);
  meta["n"] = path.n();
  meta["horizon"] = path.horizon();
  meta["queries"] = queries.size();
  meta["near_diagonal"] = near_diagonal;
  const auto files = write_bundle({table}, "estimates.json", meta, o.out);
  list_files(o, files, out);
  out << "estimate: " << queries.size() << " queries on n=" << path.n() << ", " << near_diagonal
      << " without variance\n";
  return kOk;
}

int cmd_experiment(const RunOptions& o, std::ostream& out) {
  const ScenarioSetup setup = setup_from(o);
  const KernelConfig kernel = kernel_from(o);
  ExperimentReport report;
  if (o.command == "contour") {
    ContourSpec spec;
    spec.setup = setup;
    spec.s = o.s;
    spec.t = o.t;
    spec.n_list = o.n_list;
    spec.uv_grid = o.uv_grid;
    spec.level = o.level;
    spec.replications = o.replications;
    spec.seed = o.seed;
    spec.workers = o.workers;
    spec.kernel = kernel;
    report = run_contour(spec);
  } else if (o.command == "qq") {
    QqSpec spec;
    spec.setup = setup;
    spec.s = o.s;
    spec.t = o.t;
    spec.u = o.u;
    spec.v = o.v;
    spec.n = o.n;
    spec.replications = o.replications;
    spec.level = o.level;
    spec.seed = o.seed;
    spec.workers = o.workers;
    spec.kernel = kernel;
    report = run_qq(spec);
  } else if (o.command == "rho") {
    RhoSpec spec;
    spec.setup = setup;
    spec.tau = o.tau;
    spec.st_step = o.st_step;
    spec.uv_grid = o.uv_grid;
    spec.n_list = o.n_list;
    spec.replications = o.replications;
    spec.seed = o.seed;
    spec.workers = o.workers;
    spec.kernel = kernel;
    report = run_rho(spec);
  } else {
    throw DomainError("unknown experiment '" + o.command + "'");
  }
  report.metadata["config"] = to_json(o);
  const auto files = write_report(report, o.out);
  list_files(o, files, out);
  out << report.summary << '\n';
  return kOk;
}

}  // namespace tccopula::cli
