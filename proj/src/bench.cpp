#include "gravtile/bench.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gravtile {

std::vector<ScalingRow> scaling_report(
    const std::vector<std::pair<int, double>> &runs) {
  if (runs.empty()) throw std::invalid_argument("scaling report has no runs");
  double baseline = 0.0;
  bool have_baseline = false;
  for (const auto &[ranks, time_s] : runs) {
    if (ranks < 1)
      throw std::invalid_argument("scaling report: rank count must be >= 1");
    if (!(time_s > 0.0))
      throw std::invalid_argument("scaling report: times must be positive");
    if (ranks == 1 && !have_baseline) {
      baseline = time_s;
      have_baseline = true;
    }
  }
  if (!have_baseline)
    throw std::invalid_argument(
        "scaling report needs a single-rank baseline run");
  std::vector<ScalingRow> rows;
  rows.reserve(runs.size());
  for (const auto &[ranks, time_s] : runs) {
    ScalingRow row;
    row.ranks = ranks;
    row.time_s = time_s;
    row.speedup = baseline / time_s;
    row.efficiency = row.speedup / static_cast<double>(ranks);
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ScalingRow &a, const ScalingRow &b) {
                     return a.ranks < b.ranks;
                   });
  return rows;
}

EnergyTrace synthesize_trace(double active_s, std::size_t chips,
                             const PowerModelParams &params) {
  if (!(active_s > 0.0))
    throw std::invalid_argument("synthetic trace needs a positive duration");
  if (!(params.sample_hz > 0.0))
    throw std::invalid_argument("synthetic trace needs a positive sample rate");
  if (params.quiescence_s < 0.0)
    throw std::invalid_argument("quiescence padding cannot be negative");

  const double dt = 1.0 / params.sample_hz;
  // Align the window to the sampling grid so its edges are real samples and
  // window integrals stay exact for piecewise-constant power.
  const double pad = std::ceil(params.quiescence_s / dt) * dt;
  const double active = std::ceil(active_s / dt) * dt;
  const double total = pad + active + pad;

  EnergyTrace trace;
  trace.window = Window{pad, pad + active};

  std::vector<double> grid;
  for (double ts = 0.0; ts <= total + dt / 2.0; ts += dt) grid.push_back(ts);

  for (std::size_t chip = 0; chip < chips; ++chip) {
    Channel c;
    c.name = "chip" + std::to_string(chip);
    c.kind = ChannelKind::Power;
    c.t = grid;
    for (double ts : grid) {
      const bool active_now =
          ts >= trace.window.t_start && ts <= trace.window.t_end;
      c.v.push_back(active_now ? params.chip_active_w : params.chip_idle_w);
    }
    trace.channels.push_back(std::move(c));
  }

  Channel host;
  host.name = "host";
  host.kind = ChannelKind::Energy;
  host.t = grid;
  for (double ts : grid) host.v.push_back(params.host_idle_w * ts);
  trace.channels.push_back(std::move(host));
  return trace;
}

BenchRun measure_trace(const EnergyTrace &trace, const std::string &label) {
  if (trace.channels.empty())
    throw std::invalid_argument("trace has no channels");
  if (!(trace.window.t_end > trace.window.t_start))
    throw std::invalid_argument("trace window is empty");
  BenchRun run;
  run.label = label;
  run.time_to_solution_s = trace.window.duration();

  std::vector<Channel> power_channels;
  power_channels.reserve(trace.channels.size());
  for (const auto &c : trace.channels) {
    if (c.kind == ChannelKind::Power) {
      power_channels.push_back(c);
    } else {
      power_channels.push_back(energy_channel_to_power(c));
    }
  }
  for (const auto &c : power_channels)
    run.energy_to_solution_j += integrate_power(c, trace.window);

  const CombinedPower combined = total_power(power_channels);
  run.peak_power_w = peak_power(combined.sum, trace.window);
  run.clamped_extrapolation = combined.clamped_extrapolation;
  run.edp_js = run.energy_to_solution_j * run.time_to_solution_s;
  return run;
}

namespace {

RunStats stats_over(const std::vector<BenchRun> &runs,
                    double BenchRun::*field) {
  RunStats s;
  const double n = static_cast<double>(runs.size());
  for (const auto &r : runs) s.mean += r.*field;
  s.mean /= n;
  if (runs.size() > 1) {
    double ss = 0.0;
    for (const auto &r : runs) {
      const double d = r.*field - s.mean;
      ss += d * d;
    }
    s.stddev = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

}  // namespace

BenchReport bench_report(std::vector<BenchRun> runs) {
  if (runs.empty())
    throw std::invalid_argument("bench report needs at least one run");
  BenchReport report;
  report.time_s = stats_over(runs, &BenchRun::time_to_solution_s);
  report.energy_j = stats_over(runs, &BenchRun::energy_to_solution_j);
  report.edp_js = stats_over(runs, &BenchRun::edp_js);
  report.peak_w = stats_over(runs, &BenchRun::peak_power_w);
  report.runs = std::move(runs);
  return report;
}

}  // namespace gravtile
