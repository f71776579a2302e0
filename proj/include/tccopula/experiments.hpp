#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tccopula/copula.hpp"
#include "tccopula/simulate.hpp"
#include "tccopula/statistics.hpp"

namespace tccopula {

inline constexpr const char* kVersion = "0.1.0";

/// How each replication's path is generated.
struct ScenarioSetup {
  VolatilityModel model = CirParams{};
  double horizon = 1.0;
  int substeps = 10;

  void validate() const;
};

struct ContourSpec {
  ScenarioSetup setup{};
  double s = 0.3;
  double t = 0.7;
  std::vector<int> n_list{100, 10000};
  int uv_grid = 101;
  double level = 0.95;
  int replications = 1;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  KernelConfig kernel{};

  void validate() const;
};

struct QqSpec {
  ScenarioSetup setup{};
  double s = 0.3;
  double t = 0.7;
  double u = 0.7;
  double v = 0.3;
  int n = 10000;
  int replications = 1000;
  double level = 0.95;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  KernelConfig kernel{};

  void validate() const;
};

struct RhoSpec {
  ScenarioSetup setup{};  ///< setup.horizon is the upper time bound of the sup
  double tau = 0.1;
  double st_step = 0.05;
  int uv_grid = 101;
  std::vector<int> n_list{100, 1000, 10000};
  int replications = 500;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  KernelConfig kernel{};

  void validate() const;
};

/// A named table of equal-length real columns, written as one CSV file.
struct DataTable {
  std::string name;
  std::vector<std::string> headers;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const noexcept { return columns.empty() ? 0 : columns.front().size(); }
  const std::vector<double>& column(const std::string& header) const;
};

enum class ExperimentKind { contour, qq, rho };
const char* kind_name(ExperimentKind kind) noexcept;

struct ExperimentReport {
  ExperimentKind kind = ExperimentKind::qq;
  std::vector<DataTable> tables;
  nlohmann::json metadata;  ///< spec echo, version, seeds, summary statistics
  std::string summary;      ///< one line for the console

  const DataTable& table(const std::string& name) const;
};

nlohmann::json to_json(const ScenarioSetup& setup);
nlohmann::json to_json(const ContourSpec& spec);
nlohmann::json to_json(const QqSpec& spec);
nlohmann::json to_json(const RhoSpec& spec);

/// Seed of replication `index` at sample size n, derived from the master seed.
std::uint64_t replication_seed(std::uint64_t master, int n, std::size_t index) noexcept;

/// Runs body(i) for i in [0, count) on up to `workers` threads. Results must
/// be written by index; the first exception (lowest index) is rethrown.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body);

/// Uniform grid k/(points−1), k = 0..points−1.
std::vector<double> unit_grid(int points);

/// τ, τ+step, ... up to the horizon (inclusive within 1e-9).
std::vector<double> time_grid(double tau, double horizon, double step);

struct SupNormResult {
  double value = 0.0;
  double s = 0.0;  ///< time of the maximizing cell
  double t = 0.0;
  double u = 0.0;
  double v = 0.0;
};

/// sup over a (s,t) × (u,v) grid of |ψ(a_s, a_t; u, v) − ψ(b_s, b_t; u, v)|
/// for two clocks a and b sampled at the grid times.
class SupNormGrid {
 public:
  SupNormGrid(std::vector<double> times, int uv_points, KernelConfig cfg = {});

  const std::vector<double>& times() const noexcept { return times_; }

  /// With exploit_symmetry only pairs s <= t are visited.
  SupNormResult distance(std::span<const double> clock_a, std::span<const double> clock_b,
                         bool exploit_symmetry = true) const;

 private:
  std::vector<double> times_;
  UGridProfile profile_;
};

ExperimentReport run_contour(const ContourSpec& spec);
ExperimentReport run_qq(const QqSpec& spec);
ExperimentReport run_rho(const RhoSpec& spec);

/// Writes every table as `<dir>/<table>.csv` and the metadata as
/// `<dir>/<kind>_report.json`. Files are staged and renamed into place only
/// after all of them were written. Returns the written paths.
std::vector<std::string> write_report(const ExperimentReport& report, const std::string& dir);

/// Writes tables as `<dir>/<name>.csv` plus `<dir>/<json_name>` with the
/// same staging as write_report.
std::vector<std::string> write_bundle(const std::vector<DataTable>& tables, const std::string& json_name,
                                      const nlohmann::json& metadata, const std::string& dir);

/// Shortest decimal text that round-trips; "nan" for NaN.
std::string format_real(double x);

void write_csv(const DataTable& table, const std::string& path);

}  // namespace tccopula
