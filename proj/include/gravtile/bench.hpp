#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gravtile/trace.hpp"

namespace gravtile {

struct ScalingRow {
  int ranks = 0;
  double time_s = 0.0;
  double speedup = 0.0;     // T(1) / T(k)
  double efficiency = 0.0;  // speedup / k
};

/// Strong-scaling table from (ranks, seconds) pairs; requires the ranks=1
/// baseline and positive times. Rows come back sorted by rank count.
std::vector<ScalingRow> scaling_report(
    const std::vector<std::pair<int, double>> &runs);

/// Synthetic power model standing in for live telemetry: a host channel
/// recorded as cumulative energy plus one instantaneous-power channel per
/// accelerator chip.
struct PowerModelParams {
  double host_idle_w = 150.0;
  double chip_active_w = 100.0;
  double chip_idle_w = 15.0;
  double sample_hz = 1.0;
  double quiescence_s = 4.0;  // padding recorded before and after the window
};

/// Trace for one run: chips idle during the padding, active inside the
/// window; the host draws its idle power throughout. Window edges fall on
/// sample timestamps.
EnergyTrace synthesize_trace(double active_s, std::size_t chips,
                             const PowerModelParams &params);

struct BenchRun {
  std::string label;
  double time_to_solution_s = 0.0;
  double energy_to_solution_j = 0.0;
  double edp_js = 0.0;  // energy × time
  double peak_power_w = 0.0;
  bool clamped_extrapolation = false;
};

/// Time/energy/EDP/peak for one trace: duration of the active window,
/// integral of every channel over it (energy channels are differentiated
/// first), and the peak of the summed power inside it.
BenchRun measure_trace(const EnergyTrace &trace, const std::string &label = "");

struct RunStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single run
};

struct BenchReport {
  std::vector<BenchRun> runs;
  RunStats time_s;
  RunStats energy_j;
  RunStats edp_js;
  RunStats peak_w;
};

BenchReport bench_report(std::vector<BenchRun> runs);

}  // namespace gravtile
