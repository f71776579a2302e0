#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "tccopula/errors.hpp"
#include "tccopula/estimators.hpp"

namespace tccopula::cli {

enum ExitCode : int {
  kOk = 0,
  kValidation = 2,
  kNumerical = 3,
  kIo = 4,
  kNonUniformGrid = 5,
};

/// The file could be read but is not a valid header + numeric-rows CSV.
class MalformedCsvError : public IoError {
 public:
  using IoError::IoError;
};

/// Path timestamps are not of the form i/n starting at 0.
class NonUniformGridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvData {
  std::vector<std::string> headers;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const noexcept { return columns.empty() ? 0 : columns.front().size(); }
  /// Index of a header, or throws MalformedCsvError.
  std::size_t index(const std::string& header, const std::string& source) const;
};

/// Reads a comma-separated file with one header row and real-valued cells
/// ("nan" allowed). Blank trailing lines are ignored.
CsvData read_csv(const std::string& path);

/// Builds a SampledPath from (time, X) columns. n is inferred from the time
/// step, which must be constant to 1e-9 relative and equal to 1/n.
SampledPath path_from_columns(const std::vector<double>& time, const std::vector<double>& x);

/// Every option the CLI accepts. Fields left at their sentinel (-1, 0 or
/// empty) take the default of the selected command.
struct RunOptions {
  std::string command;
  std::string out = "out";
  std::uint64_t seed = 1;
  unsigned workers = 1;
  bool verbose = false;

  std::string vol = "cir";
  double kappa = 0.5;
  double theta = 1.5;
  double nu = 1.0;
  double s0 = 1.5;
  double sigma2 = 1.0;
  double horizon = 1.0;
  int substeps = 10;

  int n = -1;
  std::vector<int> n_list;
  int replications = -1;
  double s = 0.3;
  double t = 0.7;
  double u = 0.7;
  double v = 0.3;
  double level = 0.95;
  int uv_grid = 101;
  double tau = 0.1;
  double st_step = 0.05;

  std::string input;
  std::string queries;

  double abs_tol = 1e-10;
  int max_subdivisions = 200;
  double diag_rel_tol = 1e-12;

  /// Fills the command-dependent sentinels.
  void resolve();
};

nlohmann::json to_json(const RunOptions& opts);

int cmd_simulate(const RunOptions& opts, std::ostream& out);
int cmd_estimate(const RunOptions& opts, std::ostream& out);
int cmd_experiment(const RunOptions& opts, std::ostream& out);

/// Parses arguments (program name excluded), runs the command and maps
/// exceptions to exit codes with a message on err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace tccopula::cli
