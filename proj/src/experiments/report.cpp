#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "tccopula/errors.hpp"
#include "tccopula/experiments.hpp"

namespace tccopula {

namespace fs = std::filesystem;

namespace {

void check_sample_sizes(const std::vector<int>& n_list, double horizon) {
  if (n_list.empty()) throw DomainError("n_list must not be empty");
  for (int n : n_list) SimConfig{n, horizon, 1, 0}.validate();
}

nlohmann::json kernel_json(const KernelConfig& k) {
  return {{"diag_rel_tol", k.diag_rel_tol},
          {"abs_tol", k.quad.abs_tol},
          {"max_subdivisions", k.quad.max_subdivisions}};
}

}  // namespace

void ScenarioSetup::validate() const {
  validate_model(model);
  if (!(std::isfinite(horizon) && horizon > 0.0)) throw DomainError("horizon must be > 0");
  if (substeps < 1) throw DomainError("substeps must be >= 1");
}

void ContourSpec::validate() const {
  setup.validate();
  if (!(s > 0.0 && s < t && t <= setup.horizon)) throw DomainError("contour: requires 0 < s < t <= horizon");
  check_sample_sizes(n_list, setup.horizon);
  if (uv_grid < 2) throw DomainError("contour: uv_grid must be >= 2");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("contour: level must lie in (0,1)");
  if (replications < 1) throw DomainError("contour: replications must be >= 1");
  kernel.validate();
}

void QqSpec::validate() const {
  setup.validate();
  if (!(s > 0.0 && s < t && t <= setup.horizon)) throw DomainError("qq: requires 0 < s < t <= horizon");
  if (!(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0)) throw DomainError("qq: requires u, v in (0,1)");
  SimConfig{n, setup.horizon, setup.substeps, 0}.validate();
  if (replications < 1) throw DomainError("qq: replications must be >= 1");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("qq: level must lie in (0,1)");
  kernel.validate();
}

void RhoSpec::validate() const {
  setup.validate();
  if (!(tau > 0.0 && tau < setup.horizon)) throw DomainError("rho: requires 0 < tau < horizon");
  if (!(st_step > 0.0)) throw DomainError("rho: st_step must be > 0");
  if (uv_grid < 2) throw DomainError("rho: uv_grid must be >= 2");
  check_sample_sizes(n_list, setup.horizon);
  if (replications < 2) throw DomainError("rho: density estimates need replications >= 2");
  kernel.validate();
}

const std::vector<double>& DataTable::column(const std::string& header) const {
  for (std::size_t i = 0; i < headers.size(); ++i)
    if (headers[i] == header) return columns[i];
  throw DomainError("table '" + name + "' has no column '" + header + "'");
}

const char* kind_name(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::contour:
      return "contour";
    case ExperimentKind::qq:
      return "qq";
    case ExperimentKind::rho:
      return "rho";
  }
  return "unknown";
}

const DataTable& ExperimentReport::table(const std::string& name) const {
  for (const DataTable& t : tables)
    if (t.name == name) return t;
  throw DomainError(std::string("report has no table '") + name + "'");
}

nlohmann::json to_json(const ScenarioSetup& setup) {
  nlohmann::json j;
  if (const auto* cir = std::get_if<CirParams>(&setup.model)) {
    j["volatility"] = {{"model", "cir"},
                       {"kappa", cir->kappa},
                       {"theta", cir->theta},
                       {"nu", cir->nu},
                       {"s0", cir->s0}};
  } else {
    j["volatility"] = {{"model", "constant"},
                       {"sigma2", std::get<ConstantVolatility>(setup.model).sigma2}};
  }
  j["horizon"] = setup.horizon;
  j["substeps"] = setup.substeps;
  return j;
}

nlohmann::json to_json(const ContourSpec& spec) {
  return {{"setup", to_json(spec.setup)}, {"s", spec.s},
          {"t", spec.t},                  {"n_list", spec.n_list},
          {"uv_grid", spec.uv_grid},      {"level", spec.level},
          {"replications", spec.replications}, {"seed", spec.seed},
          {"kernel", kernel_json(spec.kernel)}};
}

nlohmann::json to_json(const QqSpec& spec) {
  return {{"setup", to_json(spec.setup)},
          {"s", spec.s},
          {"t", spec.t},
          {"u", spec.u},
          {"v", spec.v},
          {"n", spec.n},
          {"replications", spec.replications},
          {"level", spec.level},
          {"seed", spec.seed},
          {"kernel", kernel_json(spec.kernel)}};
}

nlohmann::json to_json(const RhoSpec& spec) {
  return {{"setup", to_json(spec.setup)}, {"tau", spec.tau},
          {"st_step", spec.st_step},      {"uv_grid", spec.uv_grid},
          {"n_list", spec.n_list},        {"replications", spec.replications},
          {"seed", spec.seed},            {"kernel", kernel_json(spec.kernel)}};
}

std::vector<double> unit_grid(int points) {
  if (points < 2) throw DomainError("unit_grid: need at least two points");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) g[k] = static_cast<double>(k) / (points - 1);
  g.back() = 1.0;
  return g;
}

std::vector<double> time_grid(double tau, double horizon, double step) {
  if (!(step > 0.0 && tau <= horizon)) throw DomainError("time_grid: requires step > 0 and tau <= horizon");
  const auto count = static_cast<std::size_t>(std::floor((horizon - tau) / step + 1e-9)) + 1;
  std::vector<double> g(count);
  for (std::size_t k = 0; k < count; ++k) g[k] = tau + step * static_cast<double>(k);
  if (std::fabs(g.back() - horizon) <= 1e-9 * std::max(1.0, horizon)) g.back() = horizon;
  return g;
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_csv(const DataTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (std::size_t c = 0; c < table.headers.size(); ++c) out << (c ? "," : "") << table.headers[c];
  out << '\n';
  const std::size_t rows = table.rows();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c)
      out << (c ? "," : "") << format_real(table.columns[c][r]);
    out << '\n';
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<std::string> write_report(const ExperimentReport& report, const std::string& dir) {
  return write_bundle(report.tables, std::string(kind_name(report.kind)) + "_report.json", report.metadata,
                      dir);
}

std::vector<std::string> write_bundle(const std::vector<DataTable>& tables, const std::string& json_name,
                                      const nlohmann::json& metadata, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());

  std::vector<std::pair<fs::path, fs::path>> staged;
  const auto cleanup = [&] {
    for (const auto& [tmp, final_path] : staged) fs::remove(tmp, ec);
  };
  try {
    for (const DataTable& t : tables) {
      const fs::path final_path = fs::path(dir) / (t.name + ".csv");
      const fs::path tmp = final_path.string() + ".tmp";
      staged.emplace_back(tmp, final_path);
      write_csv(t, tmp.string());
    }
    const fs::path meta = fs::path(dir) / json_name;
    const fs::path tmp = meta.string() + ".tmp";
    staged.emplace_back(tmp, meta);
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << metadata.dump(2) << '\n';
    out.close();
    if (!out) throw IoError("failed writing '" + tmp.string() + "'");
  } catch (...) {
    cleanup();
    throw;
  }

  std::vector<std::string> written;
  for (const auto& [tmp, final_path] : staged) {
    fs::rename(tmp, final_path, ec);
    if (ec) {
      cleanup();
      throw IoError("cannot move '" + tmp.string() + "' into place: " + ec.message());
    }
    written.push_back(final_path.string());
  }
  return written;
}

}  // namespace tccopula
