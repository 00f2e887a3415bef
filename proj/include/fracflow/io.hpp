#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fracflow/flow.hpp"
#include "fracflow/grid.hpp"

namespace fracflow {

/// Shortest round-trip decimal rendering of a double. Locale-independent by
/// construction (std::to_chars), so files are identical across systems.
std::string format_double(double x);

/// Locale-independent parse of a full token; throws std::invalid_argument on
/// malformed or partially-consumed input.
double parse_double(std::string_view s);

/// On-disk field snapshot: one header line "dim m alpha t", then
/// grid.size() samples, one per line, in row-major node order.
struct SnapshotFile {
  PeriodicField field;
  double alpha = 0.5;
  double t = 0.0;
};

void write_snapshot(const std::filesystem::path& path, const PeriodicField& u,
                    double alpha, double t);
SnapshotFile read_snapshot(const std::filesystem::path& path);

/// trace.csv layout (fixed header row, newline-terminated):
///   t,sup,grad_sup_x1[,grad_sup_x2],dt_sup,mean,osc,besov
/// one row per recorded step; "besov" is the block seminorm at s = 1.5.
void write_trace_csv(const std::filesystem::path& path, const FlowTrace& tr);

/// Numeric CSV with a header row, used to read back this module's outputs.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // rows[i].size() == columns.size()

  std::vector<double> column(std::string_view name) const;  // throws if absent
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace fracflow
