#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tccopula/cli.hpp"
#include "tccopula/experiments.hpp"

namespace tccopula::cli {

namespace {

void add_options(CLI::App& app, RunOptions& o) {
  app.set_config("--config", "", "TOML or INI file with option values; flags given on the command line win");
  app.add_option("--command", o.command, "simulate, estimate, contour, qq or rho")
      ->required()
      ->check(CLI::IsMember({"simulate", "estimate", "contour", "qq", "rho"}));
  app.add_option("--out", o.out, "output directory")->capture_default_str();
  app.add_option("--seed", o.seed, "master seed")->capture_default_str();
  app.add_option("--workers", o.workers, "worker threads for replications")->capture_default_str();
  app.add_flag("--verbose", o.verbose, "list written files");

  app.add_option("--vol", o.vol, "volatility model: cir or constant")->capture_default_str();
  app.add_option("--kappa", o.kappa, "CIR mean reversion")->capture_default_str();
  app.add_option("--theta", o.theta, "CIR long-run variance")->capture_default_str();
  app.add_option("--nu", o.nu, "CIR vol of vol")->capture_default_str();
  app.add_option("--s0", o.s0, "CIR initial variance")->capture_default_str();
  app.add_option("--sigma2", o.sigma2, "variance level for --vol constant")->capture_default_str();
  app.add_option("--horizon", o.horizon, "observation window [0, horizon]")->capture_default_str();
  app.add_option("--substeps", o.substeps, "volatility sub-steps per observation")->capture_default_str();

  app.add_option("--n", o.n, "observations per unit time (default 10000)");
  app.add_option("--n-list", o.n_list, "sample sizes for contour and rho")->delimiter(',');
  app.add_option("--replications", o.replications, "Monte Carlo replications (contour 1, qq 1000, rho 500)");
  app.add_option("--s", o.s, "first query time")->capture_default_str();
  app.add_option("--t", o.t, "second query time")->capture_default_str();
  app.add_option("--u", o.u, "first copula argument")->capture_default_str();
  app.add_option("--v", o.v, "second copula argument")->capture_default_str();
  app.add_option("--level", o.level, "confidence level")->capture_default_str();
  app.add_option("--uv-grid", o.uv_grid, "points per (u,v) axis")->capture_default_str();
  app.add_option("--tau", o.tau, "lower time bound of the rho grid")->capture_default_str();
  app.add_option("--st-step", o.st_step, "step of the rho time grid")->capture_default_str();

  app.add_option("--input", o.input, "path CSV with time and X columns (estimate)");
  app.add_option("--queries", o.queries, "CSV with s,t,u,v[,level] columns (estimate)");

  app.add_option("--abs-tol", o.abs_tol, "quadrature absolute tolerance")->capture_default_str();
  app.add_option("--max-subdivisions", o.max_subdivisions, "quadrature panel limit")->capture_default_str();
  app.add_option("--diag-rel-tol", o.diag_rel_tol, "relative tolerance for s = t")->capture_default_str();
}

int dispatch(const RunOptions& o, std::ostream& out) {
  if (o.command == "simulate") return cmd_simulate(o, out);
  if (o.command == "estimate") return cmd_estimate(o, out);
  return cmd_experiment(o, out);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conditional copula estimation for time-changed Brownian motion"};
  app.set_version_flag("--version", kVersion);
  RunOptions o;
  add_options(app, o);
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }
  o.resolve();

  try {
    return dispatch(o, out);
  } catch (const NonUniformGridError& e) {
    err << "error: " << e.what() << '\n';
    return kNonUniformGrid;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const ConvergenceError& e) {
    err << "error: numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace tccopula::cli
