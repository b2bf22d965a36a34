#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gravtile/bench.hpp"
#include "gravtile/topology.hpp"

namespace gravtile {

/// Fully resolved invocation settings. Defaults are what an empty config
/// file yields; command-line flags override file values field by field.
struct RunConfig {
  // simulation
  std::size_t particles = 4096;
  int steps = 3;
  double dt = 0.01;
  std::uint64_t seed = 42;
  std::string ic_model = "uniform-sphere";
  std::string order = "hermite4";  // hermite4 | hermite6
  std::string backend = "device";  // device | oracle

  // cluster
  int mode = 1;            // 1 single-chip, 2 dual-chip, 3 dual-chip mesh
  int cards = 1;
  int chips_per_card = 0;  // 0 = derived from mode (1 → 1, 2/3 → 2)
  int cores = 64;          // simulated cores per chip
  int pool = 0;            // host workers per chip; 0 = auto
  LinkParams pcie{16.0e9, 50.0e-6};
  LinkParams eth{1.25e9, 12.5e-3};
  PerfParams perf;

  // bench / reporting
  int repetitions = 3;
  PowerModelParams power;
  std::vector<std::string> trace_paths;  // ingest these instead of synthesizing
  std::vector<int> scale_ranks{1, 2, 4};
  std::size_t histogram_bins = 32;

  // validation tolerances (relative)
  double acc_tolerance = 5.0e-4;
  double jerk_tolerance = 2.0e-3;
  double energy_bin_tolerance = 0.02;

  // output
  std::string out_dir = "out";
  std::string emit = "table";  // table | json

  int effective_chips_per_card() const { return mode == 1 ? 1 : 2; }

  /// Range/consistency checks; throws std::invalid_argument naming the
  /// offending key.
  void validate() const;

  /// The effective configuration as a JSON document (the reproducibility
  /// echo).
  std::string echo_json() const;

  ClusterConfig make_cluster_config() const;
};

/// Parse a JSON config document; unknown keys, type mismatches, and
/// out-of-range values throw std::invalid_argument naming the key. `base`
/// supplies the defaults. An empty or whitespace-only document is valid.
RunConfig parse_config_text(const std::string &text,
                            const RunConfig &base = RunConfig{});

RunConfig parse_config_file(const std::string &path,
                            const RunConfig &base = RunConfig{});

}  // namespace gravtile
