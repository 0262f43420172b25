#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "isindy/core_types.hpp"

namespace isindy::csv {

// Dataset format: header `t,<name1>,...,<named>`, then one row per sample.
// Values are written with 17 significant digits so they read back exactly.

RawSeries read(std::istream& in);
RawSeries read_file(const std::filesystem::path& path);

/// Reads and validates in one go.
ObservationSet read_observations(const std::filesystem::path& path);

void write(std::ostream& out, const TimeGrid& grid, const Eigen::MatrixXd& values,
           const std::vector<std::string>& labels);
void write_file(const std::filesystem::path& path, const TimeGrid& grid,
                const Eigen::MatrixXd& values, const std::vector<std::string>& labels);

std::string format_double(double value);

}  // namespace isindy::csv
