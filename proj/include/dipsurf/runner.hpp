#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dipsurf/material_db.hpp"
#include "dipsurf/result_table.hpp"
#include "dipsurf/scenario.hpp"

namespace dipsurf {

struct NamedTable {
  std::string suffix;  // appended to the output stem, e.g. "_metrics"
  ResultTable table;
};

struct ComputeResult {
  std::vector<NamedTable> tables;
  std::size_t failed_points = 0;  // rows marked with a quadrature failure
  std::vector<std::string> warnings;
};

/// Evaluates every sweep point; results are ordered by sweep index whatever the
/// thread count. Quadrature failures become rows with status "nonconverged".
ComputeResult compute_scenario(const Scenario& scenario, const MaterialDb& db, unsigned threads = 0);

struct RunOptions {
  unsigned threads = 0;  // 0: all cores
  std::optional<double> tolerance;  // overrides quadrature.rel_tol
  std::string output_dir = ".";
  bool json = false;
  std::string timestamp;  // empty: current UTC time
};

struct RunOutcome {
  std::vector<std::string> files;
  std::size_t failed_points = 0;
  std::vector<std::string> warnings;
  int exit_code = 0;  // 0 ok, 3 quadrature failures present
};

/// Computes and writes <output_dir>/<output><suffix>.csv (and .json). Throws
/// IoError when the outputs cannot be written.
RunOutcome run_scenario(Scenario scenario, const RunOptions& options);

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;
inline constexpr int schema = 2;
inline constexpr int nonconvergence = 3;
inline constexpr int io = 4;
}  // namespace exit_code

}  // namespace dipsurf
