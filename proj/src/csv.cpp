#include "isindy/csv.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace isindy::csv {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  // strtod accepts nan/inf so those reach the NonFinite check instead of a parse error
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (cell.empty() || end != begin + cell.size()) {
    throw Error(ErrorCode::ParseError, "csv",
                "bad number '" + cell + "' at row " + std::to_string(row) + ", column " +
                    std::to_string(col));
  }
  return v;
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

RawSeries read(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (!split(line).empty()) break;
  }
  const auto header = split(line);
  if (header.empty()) throw Error(ErrorCode::TooShort, "csv", "empty input");
  if (header.size() < 2 || header.front() != "t")
    throw Error(ErrorCode::ParseError, "csv", "header must be t,<name1>,...");

  const std::size_t d = header.size() - 1;
  std::vector<double> times;
  std::vector<double> flat;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    const auto cells = split(line);
    if (cells.empty()) continue;
    if (cells.size() != d + 1)
      throw Error(ErrorCode::ParseError, "csv",
                  "row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                      " cells, expected " + std::to_string(d + 1));
    times.push_back(parse_cell(cells[0], row, 0));
    for (std::size_t j = 0; j < d; ++j) flat.push_back(parse_cell(cells[j + 1], row, j + 1));
    ++row;
  }

  RawSeries raw;
  raw.times = std::move(times);
  raw.labels.assign(header.begin() + 1, header.end());
  raw.values.resize(static_cast<Index>(row), static_cast<Index>(d));
  for (std::size_t i = 0; i < row; ++i)
    for (std::size_t j = 0; j < d; ++j)
      raw.values(static_cast<Index>(i), static_cast<Index>(j)) = flat[i * d + j];
  return raw;
}

RawSeries read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "csv", "cannot open " + path.string());
  return read(in);
}

ObservationSet read_observations(const std::filesystem::path& path) {
  return validate_observations(read_file(path));
}

void write(std::ostream& out, const TimeGrid& grid, const Eigen::MatrixXd& values,
           const std::vector<std::string>& labels) {
  if (values.rows() != grid.n() || static_cast<Index>(labels.size()) != values.cols())
    throw Error(ErrorCode::DimensionMismatch, "csv", "grid, values and labels disagree");
  out << 't';
  for (const auto& label : labels) out << ',' << label;
  out << '\n';
  for (Index k = 0; k < values.rows(); ++k) {
    out << format_double(grid.time(k));
    for (Index j = 0; j < values.cols(); ++j) out << ',' << format_double(values(k, j));
    out << '\n';
  }
}

void write_file(const std::filesystem::path& path, const TimeGrid& grid,
                const Eigen::MatrixXd& values, const std::vector<std::string>& labels) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ConfigError, "csv", "cannot write " + path.string());
  write(out, grid, values, labels);
}

}  // namespace isindy::csv
