#pragma once

#include <string>
#include <vector>

#include "cclab/chain_model.hpp"
#include "cclab/cumulants.hpp"

namespace cclab {

/// Declarative description of one experiment run. Parsed strictly: unknown
/// keys are rejected (with the nearest valid key named) and all validation
/// errors are collected before the parser throws.
struct RunConfig {
  std::string experiment;  // subcommand name; empty = taken from the CLI
  std::string model_path;
  ChainModel model;
  std::string obs;  // observable spec, e.g. "Z@0,Z@0"
  CumulantKind kind = CumulantKind::classical;
  int n = 2;
  std::vector<int> orders = {2, 3, 4};
  std::vector<int> xs;              // empty: experiment-specific default
  std::vector<double> ts;           // empty: experiment-specific default
  std::vector<double> times;        // per-observable evolve times for scans
  std::vector<int> translated = {1};
  double velocity = 0.0;
  std::vector<double> horizons = {5.0, 10.0, 20.0};
  double dt = 0.1;
  double theta = 1e-2;
  double tol = 0.1;
  int placements = 20;
  unsigned seed = 1;
  std::string out_dir = ".";
  int workers = 0;  // 0 = leave the BLAS thread count alone

  /// Canonical text used for the config hash recorded in artifacts.
  std::string canonical() const;
};

RunConfig parse_config(const std::string& json_text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

}  // namespace cclab
