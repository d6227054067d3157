#include "snreg/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace snreg {

TimeSeriesDataset::TimeSeriesDataset(Eigen::VectorXd y, Eigen::MatrixXd x,
                                     std::vector<std::string> names)
    : y_(std::move(y)), x_(std::move(x)), names_(std::move(names)) {
  if (y_.size() < 1) throw DataError("dataset needs at least one observation");
  if (x_.cols() < 1) throw DataError("dataset needs at least one regressor");
  if (x_.rows() != y_.size())
    throw DataError("regressor matrix has " + std::to_string(x_.rows()) +
                    " rows but the response has " + std::to_string(y_.size()));
  if (static_cast<Eigen::Index>(names_.size()) != x_.cols())
    throw DataError("expected " + std::to_string(x_.cols()) +
                    " column labels, got " + std::to_string(names_.size()));
  if (!y_.allFinite() || !x_.allFinite())
    throw DataError("dataset contains non-finite entries");
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row,
                  const std::string& col) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || cell.empty())
    throw DataError("unparseable cell '" + cell + "' at data row " +
                    std::to_string(row) + ", column '" + col + "'");
  if (!std::isfinite(value))
    throw DataError("non-finite value at data row " + std::to_string(row) +
                    ", column '" + col + "'");
  return value;
}

}  // namespace

TimeSeriesDataset load_csv(const std::string& path,
                           const std::string& response_col,
                           const std::vector<std::string>& covariate_cols,
                           bool intercept, Eigen::Index lag) {
  if (lag < 0) throw ConfigError("lag must be non-negative");
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path + "' is empty");
  const auto header = split_line(line);

  auto column_index = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw DataError("column '" + name + "' not found in '" + path + "'");
    return static_cast<std::size_t>(it - header.begin());
  };

  const std::size_t y_idx = column_index(response_col);
  std::vector<std::size_t> x_idx;
  x_idx.reserve(covariate_cols.size());
  for (const auto& name : covariate_cols) x_idx.push_back(column_index(name));
  if (x_idx.empty() && !intercept)
    throw ConfigError("no covariates requested and intercept disabled");

  std::vector<double> y_raw;
  std::vector<std::vector<double>> x_raw(x_idx.size());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto cells = split_line(line);
    if (cells.size() != header.size())
      throw DataError("data row " + std::to_string(row) + " has " +
                      std::to_string(cells.size()) + " cells, header has " +
                      std::to_string(header.size()));
    y_raw.push_back(parse_cell(cells[y_idx], row, response_col));
    for (std::size_t c = 0; c < x_idx.size(); ++c)
      x_raw[c].push_back(parse_cell(cells[x_idx[c]], row, covariate_cols[c]));
  }

  const auto rows = static_cast<Eigen::Index>(y_raw.size());
  if (rows == 0) throw DataError("'" + path + "' has no data rows");
  if (lag >= rows)
    throw DataError("lag " + std::to_string(lag) + " >= row count " +
                    std::to_string(rows));

  // Response rows lag+1..rows paired with covariate rows 1..rows-lag.
  const Eigen::Index n = rows - lag;
  const Eigen::Index k =
      static_cast<Eigen::Index>(x_idx.size()) + (intercept ? 1 : 0);

  Eigen::VectorXd y(n);
  Eigen::MatrixXd x(n, k);
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(k));
  Eigen::Index col = 0;
  if (intercept) {
    x.col(col).setOnes();
    names.emplace_back("const");
    ++col;
  }
  for (Eigen::Index t = 0; t < n; ++t) y[t] = y_raw[t + lag];
  for (std::size_t c = 0; c < x_idx.size(); ++c, ++col) {
    for (Eigen::Index t = 0; t < n; ++t) x(t, col) = x_raw[c][t];
    names.push_back(covariate_cols[c]);
  }

  if (n < k + 1)
    throw DataError("only " + std::to_string(n) + " usable rows for " +
                    std::to_string(k) + " regressors");
  return TimeSeriesDataset(std::move(y), std::move(x), std::move(names));
}

void write_csv(const std::string& path, const TimeSeriesDataset& data,
               const std::string& response_name) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << response_name;
  for (const auto& name : data.names()) out << ',' << name;
  out << '\n';
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  for (Eigen::Index t = 0; t < data.n(); ++t) {
    put(data.y()[t]);
    for (Eigen::Index c = 0; c < data.k(); ++c) {
      out << ',';
      put(data.x()(t, c));
    }
    out << '\n';
  }
  if (!out) throw DataError("write to '" + path + "' failed");
}

std::vector<std::pair<std::string, std::string>> load_key_value_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw DataError("line " + std::to_string(lineno) + " of '" + path +
                      "' is not key=value");
    const auto key = trim(stripped.substr(0, eq));
    const auto value = trim(stripped.substr(eq + 1));
    if (key.empty())
      throw DataError("empty key on line " + std::to_string(lineno));
    for (const auto& [k, v] : entries)
      if (k == key) throw DataError("duplicate key '" + key + "'");
    entries.emplace_back(key, value);
  }
  return entries;
}

}  // namespace snreg
