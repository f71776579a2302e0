#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "tccopula/errors.hpp"
#include "tccopula/experiments.hpp"
#include "tccopula/statistics.hpp"

using namespace tccopula;

namespace {

bool same_data(const ExperimentReport& a, const ExperimentReport& b) {
  if (a.tables.size() != b.tables.size()) return false;
  for (std::size_t i = 0; i < a.tables.size(); ++i) {
    const DataTable& x = a.tables[i];
    const DataTable& y = b.tables[i];
    if (x.name != y.name || x.headers != y.headers || x.columns.size() != y.columns.size()) return false;
    for (std::size_t c = 0; c < x.columns.size(); ++c) {
      if (x.columns[c].size() != y.columns[c].size()) return false;
      for (std::size_t r = 0; r < x.columns[c].size(); ++r) {
        const double p = x.columns[c][r], q = y.columns[c][r];
        if (!(std::isnan(p) && std::isnan(q)) && std::bit_cast<std::uint64_t>(p) != std::bit_cast<std::uint64_t>(q))
          return false;
      }
    }
  }
  return true;
}

bool same_tables(const ExperimentReport& a, const ExperimentReport& b) {
  return same_data(a, b) && a.metadata == b.metadata && a.summary == b.summary;
}

ScenarioSetup brownian_setup() {
  ScenarioSetup s;
  s.model = ConstantVolatility{1.0};
  return s;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("summary statistics") {
  const std::vector<double> x{4.0, 1.0, 3.0, 2.0};
  CHECK(mean(x) == 2.5);
  CHECK(sample_variance(x) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
  CHECK(quantile(x, 0.25) == doctest::Approx(1.75).epsilon(1e-15));
  CHECK(quantile(x, 0.0) == 1.0);
  CHECK(quantile(x, 1.0) == 4.0);
  CHECK(median(x) == 2.5);
  CHECK(median({5.0, 1.0, 3.0}) == 3.0);
  CHECK_THROWS_AS(sample_variance(std::vector<double>{1.0}), DomainError);
}

TEST_CASE("Kolmogorov-Smirnov distance to the normal") {
  CHECK(ks_distance_normal({0.0}) == doctest::Approx(0.5).epsilon(1e-15));
  // at the plotting positions the empirical cdf steps straddle Φ by 1/(2M)
  std::vector<double> x;
  const int m = 200;
  for (int k = 1; k <= m; ++k) x.push_back(oracle::normal_quantile((k - 0.5) / m));
  CHECK(ks_distance_normal(x) == doctest::Approx(0.5 / m).epsilon(1e-6));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  std::vector<double> big(20000);
  for (double& v : big) v = z(rng);
  CHECK(ks_distance_normal(big) < 1.36 / std::sqrt(20000.0));
  for (double& v : big) v += 0.5;
  CHECK(ks_distance_normal(big) > 0.15);
}

TEST_CASE("kde of log samples") {
  std::mt19937_64 rng(2);
  std::lognormal_distribution<double> ln(0.0, 1.0);
  std::vector<double> x(10000);
  for (double& v : x) v = ln(rng);
  const DensityEstimate d = kde_log(x);
  REQUIRE(d.grid.size() == static_cast<std::size_t>(kKdeGridPoints));
  REQUIRE(d.density.size() == d.grid.size());
  double integral = 0.0;
  for (std::size_t i = 1; i < d.grid.size(); ++i)
    integral += 0.5 * (d.density[i] + d.density[i - 1]) * (d.grid[i] - d.grid[i - 1]);
  CHECK(std::fabs(integral - 1.0) <= 1e-3);
  const auto peak = std::max_element(d.density.begin(), d.density.end()) - d.density.begin();
  CHECK(std::fabs(d.grid[static_cast<std::size_t>(peak)]) <= 0.15);

  std::vector<double> logs(x.size());
  std::transform(x.begin(), x.end(), logs.begin(), [](double v) { return std::log(v); });
  const double sd = std::sqrt(sample_variance(logs));
  const double iqr = quantile(logs, 0.75) - quantile(logs, 0.25);
  const double h = 0.9 * std::min(sd, iqr / 1.34) * std::pow(10000.0, -0.2);
  CHECK(d.bandwidth == doctest::Approx(h).epsilon(1e-12));
  const auto [lo, hi] = std::minmax_element(logs.begin(), logs.end());
  CHECK(d.grid.front() == doctest::Approx(*lo - 3 * h).epsilon(1e-12));
  CHECK(d.grid.back() == doctest::Approx(*hi + 3 * h).epsilon(1e-12));
}

TEST_CASE("kde rejects degenerate input") {
  try {
    kde_log(std::vector<double>{0.2, 0.2, 0.2});
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("zero bandwidth") != std::string::npos);
  }
  CHECK_THROWS_AS(kde_log(std::vector<double>{0.2}), DomainError);
  CHECK_THROWS_AS(kde_log(std::vector<double>{0.2, 0.0, 0.4}), DomainError);
  CHECK_THROWS_AS(kde_log(std::vector<double>{0.2, -1.0, 0.4}), DomainError);
  // IQR zero but spread present: falls back to the standard deviation
  CHECK_NOTHROW(kde_log(std::vector<double>{1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0}));
}

TEST_CASE("grids") {
  const std::vector<double> u = unit_grid(5);
  CHECK(u == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK_THROWS_AS(unit_grid(1), DomainError);
  const std::vector<double> t = time_grid(0.1, 1.0, 0.05);
  CHECK(t.size() == 19);
  CHECK(t.front() == 0.1);
  CHECK(t.back() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(time_grid(0.1, 0.3, 0.15).size() == 2);
}

TEST_CASE("sup-norm grid against a direct search") {
  const std::vector<double> times{0.2, 0.5, 0.8, 1.0};
  const SupNormGrid grid(times, 11);
  const std::vector<double> a{0.25, 0.45, 0.9, 1.1};
  const std::vector<double> b{0.2, 0.5, 0.8, 1.0};
  double best = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i)
    for (std::size_t j = 0; j < times.size(); ++j)
      for (int ku = 0; ku <= 10; ++ku)
        for (int kv = 0; kv <= 10; ++kv) {
          const UnitPair up{ku / 10.0, kv / 10.0};
          best = std::max(best, std::fabs(psi({a[i], a[j]}, up) - psi({b[i], b[j]}, up)));
        }
  const SupNormResult r = grid.distance(a, b);
  CHECK(std::fabs(r.value - best) <= 1e-9);
  CHECK(r.value == grid.distance(a, b, false).value);
  CHECK(r.u > 0.0);
  CHECK(r.u < 1.0);
  CHECK(r.v > 0.0);
  CHECK(r.v < 1.0);
  CHECK(grid.distance(a, a).value == 0.0);
  CHECK(grid.distance(b, a).value == r.value);
}

TEST_CASE("contour corners are exact and bands shrink with n") {
  ContourSpec spec;
  spec.uv_grid = 21;
  spec.replications = 20;
  spec.seed = 5;
  spec.workers = 2;
  const ExperimentReport rep = run_contour(spec);
  for (int n : spec.n_list) {
    const DataTable& c = rep.table("contour_n" + std::to_string(n));
    REQUIRE(c.rows() == 21 * 21);
    for (std::size_t r = 0; r < c.rows(); ++r) {
      const double u = c.column("u")[r], v = c.column("v")[r];
      if (u == 0.0 || u == 1.0 || v == 0.0 || v == 1.0) {
        CHECK(c.column("c_hat")[r] == c.column("c_true")[r]);
        CHECK(c.column("ci_lo")[r] == c.column("ci_hi")[r]);
      }
    }
  }
  const DataTable& small = rep.table("coverage_n100");
  const DataTable& large = rep.table("coverage_n10000");
  for (std::size_t r = 0; r < small.rows(); ++r) {
    const double u = small.column("u")[r], v = small.column("v")[r];
    if (u == 0.0 || u == 1.0 || v == 0.0 || v == 1.0) {
      CHECK(large.column("mean_width")[r] == 0.0);
      continue;
    }
    CHECK(large.column("mean_width")[r] < small.column("mean_width")[r]);
  }
}

TEST_CASE("contour reports are reproducible and worker independent") {
  ContourSpec spec;
  spec.uv_grid = 11;
  spec.n_list = {200};
  spec.replications = 6;
  spec.seed = 9;
  const ExperimentReport a = run_contour(spec);
  const ExperimentReport b = run_contour(spec);
  spec.workers = 4;
  const ExperimentReport c = run_contour(spec);
  CHECK(same_tables(a, b));
  CHECK(same_data(a, c));
  spec.seed = 10;
  CHECK_FALSE(same_data(run_contour(spec), a));
}

TEST_CASE("contour coverage at interior points") {
  ContourSpec spec;
  spec.uv_grid = 11;
  spec.n_list = {10000};
  spec.replications = 1000;
  spec.seed = 17;
  spec.workers = 4;
  const ExperimentReport rep = run_contour(spec);
  const DataTable& cov = rep.table("coverage_n10000");
  double total = 0.0, lo = 1.0, hi = 0.0;
  int cells = 0;
  for (std::size_t r = 0; r < cov.rows(); ++r) {
    const double u = cov.column("u")[r], v = cov.column("v")[r];
    if (u == 0.0 || u == 1.0 || v == 0.0 || v == 1.0) continue;
    const double c = cov.column("coverage")[r];
    total += c;
    lo = std::min(lo, c);
    hi = std::max(hi, c);
    ++cells;
  }
  MESSAGE("interior coverage mean " << total / cells << " range [" << lo << ", " << hi << "]");
  CHECK(lo >= 0.92);
  CHECK(hi <= 0.97);
}

TEST_CASE("qq with a single replication") {
  QqSpec spec;
  spec.n = 1000;
  spec.replications = 1;
  const ExperimentReport rep = run_qq(spec);
  const DataTable& qq = rep.table("qq");
  REQUIRE(qq.rows() == 1);
  CHECK(qq.column("normal_quantile")[0] == 0.0);
  CHECK(rep.table("replications").rows() == 1);
}

TEST_CASE("qq statistic is standard normal on Brownian paths") {
  QqSpec spec;
  spec.setup = brownian_setup();
  spec.replications = 1000;
  spec.seed = 3;
  spec.workers = 4;
  const ExperimentReport rep = run_qq(spec);
  const auto& res = rep.metadata["results"];
  MESSAGE("ks " << res["ks_distance"] << " mean " << res["mean_statistic"]);
  CHECK(res["ks_distance"].get<double>() < 0.06);
  CHECK(std::fabs(res["mean_statistic"].get<double>()) <= 0.1);
  const DataTable& qq = rep.table("qq");
  CHECK(qq.rows() == res["valid"].get<std::size_t>());
  CHECK(std::is_sorted(qq.column("statistic").begin(), qq.column("statistic").end()));
  CHECK(std::is_sorted(qq.column("normal_quantile").begin(), qq.column("normal_quantile").end()));
  const std::size_t m = qq.rows();
  CHECK(qq.column("normal_quantile")[0] == doctest::Approx(oracle::normal_quantile(0.5 / m)).epsilon(1e-9));
}

TEST_CASE("qq runs are reproducible across worker counts") {
  QqSpec spec;
  spec.n = 500;
  spec.replications = 40;
  spec.seed = 8;
  const ExperimentReport a = run_qq(spec);
  spec.workers = 3;
  CHECK(same_data(a, run_qq(spec)));
}

TEST_CASE("rho samples") {
  RhoSpec spec;
  spec.setup = brownian_setup();
  spec.n_list = {100, 400};
  spec.replications = 8;
  spec.uv_grid = 11;
  spec.st_step = 0.15;
  spec.seed = 4;
  spec.workers = 2;
  const ExperimentReport rep = run_rho(spec);
  for (int n : spec.n_list) {
    const DataTable& s = rep.table("rho_samples_n" + std::to_string(n));
    REQUIRE(s.rows() == 8);
    for (std::size_t r = 0; r < s.rows(); ++r) {
      const double rho = s.column("rho")[r];
      CHECK(rho > 0.0);
      CHECK(rho <= 1.0);
      CHECK(s.column("log_rho")[r] == std::log(rho));
      CHECK(s.column("u_at")[r] > 0.0);
      CHECK(s.column("u_at")[r] < 1.0);
    }
    CHECK(rep.table("rho_kde_n" + std::to_string(n)).rows() == static_cast<std::size_t>(kKdeGridPoints));
  }
  CHECK(rep.metadata["results"].size() == 2);
  CHECK(rep.metadata["results"][0]["log_inv_sqrt_n"].get<double>() == doctest::Approx(std::log(0.1)));
  const ExperimentReport again = run_rho(spec);
  CHECK(same_tables(rep, again));
}

TEST_CASE("spec validation") {
  ContourSpec c;
  c.s = 0.8;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = ContourSpec{};
  c.uv_grid = 1;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = ContourSpec{};
  c.t = 1.5;
  CHECK_THROWS_AS(c.validate(), DomainError);
  QqSpec q;
  q.u = 1.0;
  CHECK_THROWS_AS(q.validate(), DomainError);
  q = QqSpec{};
  q.replications = 0;
  CHECK_THROWS_AS(q.validate(), DomainError);
  RhoSpec r;
  r.tau = 1.0;
  CHECK_THROWS_AS(r.validate(), DomainError);
  r = RhoSpec{};
  r.n_list = {};
  CHECK_THROWS_AS(r.validate(), DomainError);
  r = RhoSpec{};
  r.setup.model = CirParams{0.5, 1.0, 1.0, 1.0};
  CHECK_THROWS_AS(r.validate(), DomainError);
}

TEST_CASE("reports are written atomically as csv and json") {
  const auto dir = std::filesystem::temp_directory_path() / "tccopula_report_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  QqSpec spec;
  spec.n = 200;
  spec.replications = 5;
  const ExperimentReport rep = run_qq(spec);
  const std::vector<std::string> files = write_report(rep, dir.string());
  CHECK(files.size() == 3);
  CHECK(std::filesystem::exists(dir / "qq_report.json"));
  CHECK(std::filesystem::exists(dir / "qq.csv"));
  const std::string csv = slurp(dir / "replications.csv");
  CHECK(csv.rfind("replication,valid,c_true,c_hat,v_hat,ci_lo,ci_hi,statistic,covered\n", 0) == 0);
  const auto meta = nlohmann::json::parse(slurp(dir / "qq_report.json"));
  CHECK(meta["seed"] == spec.seed);
  CHECK(meta["spec"]["n"] == 200);
  for (const auto& e : std::filesystem::directory_iterator(dir))
    CHECK(e.path().extension() != ".tmp");
  const std::vector<std::string> again = write_report(rep, dir.string());
  CHECK(slurp(dir / "replications.csv") == csv);
  // missing directories are created; a path through a regular file cannot be
  CHECK_NOTHROW(write_report(rep, (dir / "missing" / "deeper").string()));
  CHECK(std::filesystem::exists(dir / "missing" / "deeper" / "qq.csv"));
  CHECK_THROWS(write_report(rep, (dir / "qq.csv" / "under_a_file").string()));
  std::filesystem::remove_all(dir);
}

TEST_CASE("real formatting round trips") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5, 0.0, 12345678.9})
    CHECK(std::stod(format_real(x)) == x);
  CHECK(format_real(NAN) == "nan");
  CHECK(format_real(0.5) == "0.5");
}
