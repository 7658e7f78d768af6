#pragma once

#include <string>
#include <vector>

#include "multicat/config.hpp"

namespace multicat {

// Numeric result rows plus everything needed to regenerate them. CSV cells
// use the shortest round-trip decimal form of each double, so identical
// configs produce byte-identical files regardless of thread count.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  ExperimentConfig config;

  std::string to_csv() const;
  std::string metadata_json() const; // resolved config + version + seed + timestamp
};

// Computes the table for a config without touching the filesystem.
ResultTable compute_table(const ExperimentConfig& config);

struct RunPaths {
  std::string csv;
  std::string json;
};

// Dispatches the mode, writes <prefix>.csv and <prefix>.json under the
// output directory, and returns the paths. Cap violations raise
// cap_exceeded, integrator failures raise positivity_error; the CLI maps
// those to exit codes 3 and 4.
RunPaths run(const ExperimentConfig& config, ResultTable* table_out = nullptr);

// Shortest round-trip decimal representation of a double (the CSV cell
// format).
std::string format_double(double value);

} // namespace multicat
