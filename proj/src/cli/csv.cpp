#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "tccopula/cli.hpp"

namespace tccopula::cli {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    std::string cell = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.pop_back();
    std::size_t lead = 0;
    while (lead < cell.size() && (cell[lead] == ' ' || cell[lead] == '\t')) ++lead;
    cells.push_back(cell.substr(lead));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_real(const std::string& cell, const std::string& where) {
  if (cell == "nan" || cell == "NaN") return std::numeric_limits<double>::quiet_NaN();
  double x = 0.0;
  const char* first = cell.data();
  if (!cell.empty() && cell.front() == '+') ++first;
  const auto res = std::from_chars(first, cell.data() + cell.size(), x);
  if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size())
    throw MalformedCsvError(where + ": not a number: '" + cell + "'");
  return x;
}

}  // namespace

std::size_t CsvData::index(const std::string& header, const std::string& source) const {
  for (std::size_t i = 0; i < headers.size(); ++i)
    if (headers[i] == header) return i;
  throw MalformedCsvError(source + ": missing column '" + header + "'");
}

CsvData read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  CsvData data;
  std::string line;
  std::size_t lineno = 0;
  bool blank_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      blank_seen = true;
      continue;
    }
    const std::string where = path + ":" + std::to_string(lineno);
    if (blank_seen) throw MalformedCsvError(where + ": data after a blank line");
    std::vector<std::string> cells = split(line);
    if (data.headers.empty()) {
      for (const std::string& h : cells)
        if (h.empty()) throw MalformedCsvError(where + ": empty header");
      data.headers = std::move(cells);
      data.columns.assign(data.headers.size(), {});
      continue;
    }
    if (cells.size() != data.headers.size())
      throw MalformedCsvError(where + ": expected " + std::to_string(data.headers.size()) +
                              " fields, found " + std::to_string(cells.size()));
    for (std::size_t c = 0; c < cells.size(); ++c) data.columns[c].push_back(parse_real(cells[c], where));
  }
  if (in.bad()) throw IoError("failed reading '" + path + "'");
  if (data.headers.empty()) throw MalformedCsvError(path + ": no header row");
  return data;
}

SampledPath path_from_columns(const std::vector<double>& time, const std::vector<double>& x) {
  if (time.size() != x.size()) throw MalformedCsvError("time and X columns differ in length");
  if (time.size() < 2) throw NonUniformGridError("non-uniform grid: need at least two timestamps");
  for (std::size_t i = 0; i < time.size(); ++i)
    if (!std::isfinite(time[i]) || !std::isfinite(x[i]))
      throw MalformedCsvError("row " + std::to_string(i + 1) + ": time and X must be finite");

  const double dt = time[1] - time[0];
  if (!(dt > 0.0)) throw NonUniformGridError("non-uniform grid: timestamps 0 and 1 do not increase");
  if (std::fabs(time[0]) > 1e-9 * dt) throw NonUniformGridError("non-uniform grid: first timestamp must be 0");
  for (std::size_t i = 1; i < time.size(); ++i) {
    const double step = time[i] - time[i - 1];
    if (std::fabs(step - dt) > 1e-9 * dt) {
      std::ostringstream os;
      os.precision(17);
      os << "non-uniform grid: step " << step << " at row " << i + 1 << " differs from " << dt;
      throw NonUniformGridError(os.str());
    }
  }
  const double inv = 1.0 / dt;
  const double n = std::round(inv);
  if (n < 1.0 || std::fabs(inv - n) > 1e-9 * n)
    throw NonUniformGridError("non-uniform grid: step is not 1/n for an integer n");

  SampledPath path;
  path.values = x;
  path.n = static_cast<int>(n);
  path.horizon = static_cast<double>(x.size() - 1) / n;
  path.validate();
  return path;
}

}  // namespace tccopula::cli
