#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gravtile/bench.hpp"
#include "gravtile/energy.hpp"
#include "gravtile/hermite.hpp"
#include "gravtile/run_config.hpp"

namespace gravtile {

/// Owns whichever force backend the config selects (the device backend
/// needs a live cluster behind it).
struct BackendBundle {
  std::unique_ptr<ClusterConfig> cluster;  // null for the oracle
  std::unique_ptr<EvalBackend> backend;
};

BackendBundle make_backend(const RunConfig &config);

struct RunResult {
  ParticleSystem final_system;
  RunDiagnostics diagnostics;
  std::vector<std::string> files_written;
};

/// Integrate per the config and write the echoed config, the initial
/// snapshot, with steps >= 1 the final snapshot, and per-step diagnostics
/// into config.out_dir.
RunResult run_simulation(const RunConfig &config);

struct ValidationReport {
  std::size_t particles = 0;
  double max_acc_rel_dev = 0.0;   // |device − oracle| / ‖oracle aᵢ‖, worst component
  double max_jerk_rel_dev = 0.0;
  double acc_tolerance = 0.0;
  double jerk_tolerance = 0.0;
  DistributionComparison energy_comparison;  // after config.steps steps
  bool forces_pass = false;
  bool energy_pass = false;
  bool pass = false;
};

/// Device backend vs the 64-bit oracle on the configured initial
/// conditions: single-evaluation force/jerk deviations, then an integrated
/// run on both backends compared through per-particle energy histograms.
ValidationReport run_validation(const RunConfig &config);

struct ScaleReport {
  std::vector<ScalingRow> rows;
  unsigned workers_per_chip = 0;  // fixed across the sweep
  unsigned hardware_threads = 0;
};

/// Time the device evaluation at each rank count in config.scale_ranks with
/// the worker pool per chip held fixed (sized for the largest sweep point),
/// so extra ranks model extra silicon rather than oversubscribing the host.
ScaleReport run_scale_sweep(const RunConfig &config);

struct BenchResult {
  BenchReport report;
  std::vector<std::string> files_written;
};

/// Repeat the configured run, measure evaluation wall time, and derive
/// time/energy/EDP from synthesized power traces (or from ingested trace
/// files, which replace simulation entirely). Writes the report and a flat
/// per-run table into config.out_dir.
BenchResult run_benchmark(const RunConfig &config);

// Report rendering (emit = "table" | "json").
std::string render_validation(const ValidationReport &report,
                              const std::string &emit);
std::string render_scale(const ScaleReport &report, const std::string &emit);
std::string render_bench(const BenchReport &report, const std::string &emit);
std::string render_estimate(const TimeBreakdown &breakdown, int mode,
                            std::size_t cards, std::size_t n,
                            const std::string &emit);

}  // namespace gravtile
