#include "gravtile/driver.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "gravtile/initial_conditions.hpp"
#include "gravtile/io_util.hpp"
#include "gravtile/snapshot.hpp"

namespace gravtile {

namespace {

using json = nlohmann::ordered_json;

IntegratorOrder order_from(const RunConfig &config) {
  return config.order == "hermite6" ? IntegratorOrder::Hermite6
                                    : IntegratorOrder::Hermite4;
}

double vec_norm(const Vec3 &v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

/// Worst per-component deviation, each component measured against the
/// magnitude of that particle's reference vector (a zero-crossing component
/// would make a plain component-wise ratio meaningless).
double max_component_deviation(const std::vector<Vec3> &test,
                               const std::vector<Vec3> &ref) {
  double worst = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double denom = std::max(vec_norm(ref[i]),
                                  std::numeric_limits<double>::min());
    for (int c = 0; c < 3; ++c)
      worst = std::max(worst, std::abs(test[i][c] - ref[i][c]) / denom);
  }
  return worst;
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

BackendBundle make_backend(const RunConfig &config) {
  config.validate();
  if (config.order == "hermite6" && config.backend == "device")
    throw std::invalid_argument(
        "config key 'order': hermite6 needs the oracle backend (the device "
        "pipeline produces acceleration and jerk only)");
  BackendBundle bundle;
  if (config.backend == "oracle") {
    bundle.backend = std::make_unique<OracleBackend>();
  } else {
    bundle.cluster =
        std::make_unique<ClusterConfig>(config.make_cluster_config());
    bundle.backend = std::make_unique<DeviceBackend>(*bundle.cluster);
  }
  return bundle;
}

RunResult run_simulation(const RunConfig &config) {
  config.validate();
  ParticleSystem system =
      generate_initial_conditions(config.particles, config.seed,
                                  config.ic_model);
  BackendBundle bundle = make_backend(config);
  IntegratorConfig icfg;
  icfg.dt = config.dt;
  icfg.steps = config.steps;
  icfg.order = order_from(config);
  icfg.record_diagnostics = true;
  HermiteIntegrator integrator(icfg, *bundle.backend);

  const std::filesystem::path out_dir(config.out_dir);
  std::filesystem::create_directories(out_dir);

  RunResult result;
  auto emit_file = [&](const std::string &name, const std::string &content) {
    const auto path = out_dir / name;
    atomic_write_file(path, content);
    result.files_written.push_back(path.string());
  };

  emit_file("config.json", config.echo_json());
  emit_file("snapshot_initial.txt", snapshot_to_string(system));
  result.diagnostics = integrator.run(system);
  if (config.steps > 0)
    emit_file("snapshot_final.txt", snapshot_to_string(system));

  std::ostringstream diag;
  diag << "step\ttime\tkinetic\tpotential\ttotal\tpx\tpy\tpz\teval_seconds\n";
  for (const auto &d : result.diagnostics.steps) {
    diag << d.step << '\t' << format_double(d.time) << '\t'
         << format_double(d.kinetic) << '\t' << format_double(d.potential)
         << '\t' << format_double(d.total_energy) << '\t'
         << format_double(d.momentum[0]) << '\t'
         << format_double(d.momentum[1]) << '\t'
         << format_double(d.momentum[2]) << '\t'
         << format_double(d.eval_seconds) << '\n';
  }
  emit_file("diagnostics.tsv", diag.str());
  result.final_system = std::move(system);
  return result;
}

ValidationReport run_validation(const RunConfig &config) {
  config.validate();
  ValidationReport report;
  report.particles = config.particles;
  report.acc_tolerance = config.acc_tolerance;
  report.jerk_tolerance = config.jerk_tolerance;

  const ParticleSystem initial =
      generate_initial_conditions(config.particles, config.seed,
                                  config.ic_model);

  // Single-evaluation force comparison.
  std::vector<Vec3> acc_ref, jerk_ref, acc_dev, jerk_dev;
  golden_acc_jerk(initial, acc_ref, jerk_ref);
  RunConfig device_cfg = config;
  device_cfg.backend = "device";
  {
    BackendBundle device = make_backend(device_cfg);
    device.backend->evaluate(initial, acc_dev, jerk_dev);
  }
  report.max_acc_rel_dev = max_component_deviation(acc_dev, acc_ref);
  report.max_jerk_rel_dev = max_component_deviation(jerk_dev, jerk_ref);
  report.forces_pass = report.max_acc_rel_dev <= report.acc_tolerance &&
                       report.max_jerk_rel_dev <= report.jerk_tolerance;

  // Integrated comparison through per-particle energy distributions.
  IntegratorConfig icfg;
  icfg.dt = config.dt;
  icfg.steps = config.steps;
  icfg.order = order_from(config);
  icfg.record_diagnostics = false;

  ParticleSystem oracle_system = initial;
  {
    OracleBackend oracle;
    HermiteIntegrator integrator(icfg, oracle);
    integrator.run(oracle_system);
  }
  ParticleSystem device_system = initial;
  {
    BackendBundle device = make_backend(device_cfg);
    HermiteIntegrator integrator(icfg, *device.backend);
    integrator.run(device_system);
  }

  const EnergyReport oracle_report =
      energy_report(oracle_system, config.histogram_bins);
  const EnergyReport device_report = energy_report(
      device_system, config.histogram_bins,
      std::make_pair(oracle_report.bin_edges.front(),
                     oracle_report.bin_edges.back()));
  report.energy_comparison = compare_energy_distribution(
      device_report, oracle_report, config.energy_bin_tolerance);
  report.energy_pass = report.energy_comparison.pass;
  report.pass = report.forces_pass && report.energy_pass;
  return report;
}

ScaleReport run_scale_sweep(const RunConfig &config) {
  config.validate();
  if (config.backend != "device")
    throw std::invalid_argument(
        "config key 'backend': the scaling sweep times the device backend");

  ScaleReport report;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  report.hardware_threads = hw;

  const int chips_per_card = config.effective_chips_per_card();
  const int max_ranks =
      *std::max_element(config.scale_ranks.begin(), config.scale_ranks.end());
  // Fixed pool per chip across the sweep: adding a rank must add workers
  // (more simulated silicon), not reslice a constant host budget.
  unsigned pool = config.pool > 0 ? static_cast<unsigned>(config.pool)
                                  : std::max(1u, hw / static_cast<unsigned>(
                                                          max_ranks *
                                                          chips_per_card));
  report.workers_per_chip = pool;

  const ParticleSystem initial =
      generate_initial_conditions(config.particles, config.seed,
                                  config.ic_model);

  IntegratorConfig icfg;
  icfg.dt = config.dt;
  icfg.steps = config.steps;
  icfg.order = order_from(config);
  icfg.record_diagnostics = false;

  std::vector<std::pair<int, double>> times;
  for (int ranks : config.scale_ranks) {
    RunConfig point = config;
    point.cards = ranks;
    point.pool = static_cast<int>(pool);
    BackendBundle device = make_backend(point);
    HermiteIntegrator integrator(icfg, *device.backend);
    ParticleSystem system = initial;
    const RunDiagnostics diag = integrator.run(system);
    times.emplace_back(ranks, diag.eval_seconds_total);
  }
  report.rows = scaling_report(times);
  return report;
}

BenchResult run_benchmark(const RunConfig &config) {
  config.validate();
  BenchResult result;
  std::vector<BenchRun> runs;

  if (!config.trace_paths.empty()) {
    // Ingested telemetry replaces simulation: every file is one channel of
    // a single run; the active window is the overlap of the channels.
    EnergyTrace trace;
    for (const auto &path : config.trace_paths)
      trace.channels.push_back(parse_channel(read_file(path)));
    double start = trace.channels.front().t_begin();
    double end = trace.channels.front().t_end();
    for (const auto &c : trace.channels) {
      start = std::max(start, c.t_begin());
      end = std::min(end, c.t_end());
    }
    if (!(end > start))
      throw std::invalid_argument(
          "ingested trace channels do not overlap in time");
    trace.window = Window{start, end};
    runs.push_back(measure_trace(trace, "ingested"));
  } else {
    BackendBundle bundle = make_backend(config);
    const std::size_t chips =
        bundle.cluster ? bundle.cluster->active_chips() : 0;
    const ParticleSystem initial =
        generate_initial_conditions(config.particles, config.seed,
                                    config.ic_model);
    IntegratorConfig icfg;
    icfg.dt = config.dt;
    icfg.steps = config.steps;
    icfg.order = order_from(config);
    icfg.record_diagnostics = false;
    for (int rep = 0; rep < config.repetitions; ++rep) {
      HermiteIntegrator integrator(icfg, *bundle.backend);
      ParticleSystem system = initial;
      const RunDiagnostics diag = integrator.run(system);
      const double active = std::max(diag.eval_seconds_total, 1.0e-6);
      const EnergyTrace trace = synthesize_trace(active, chips, config.power);
      runs.push_back(measure_trace(trace, "run" + std::to_string(rep)));
    }
  }

  result.report = bench_report(std::move(runs));

  const std::filesystem::path out_dir(config.out_dir);
  std::filesystem::create_directories(out_dir);
  auto emit_file = [&](const std::string &name, const std::string &content) {
    const auto path = out_dir / name;
    atomic_write_file(path, content);
    result.files_written.push_back(path.string());
  };
  emit_file("bench_report." + std::string(config.emit == "json" ? "json" : "txt"),
            render_bench(result.report, config.emit));
  std::ostringstream table;
  table << "label\ttime_s\tenergy_j\tedp_js\tpeak_w\tclamped\n";
  for (const auto &r : result.report.runs) {
    table << r.label << '\t' << format_double(r.time_to_solution_s) << '\t'
          << format_double(r.energy_to_solution_j) << '\t'
          << format_double(r.edp_js) << '\t' << format_double(r.peak_power_w)
          << '\t' << (r.clamped_extrapolation ? 1 : 0) << '\n';
  }
  emit_file("bench_runs.tsv", table.str());
  return result;
}

std::string render_validation(const ValidationReport &report,
                              const std::string &emit) {
  if (emit == "json") {
    json doc;
    doc["particles"] = report.particles;
    doc["max_acc_rel_dev"] = report.max_acc_rel_dev;
    doc["acc_tolerance"] = report.acc_tolerance;
    doc["max_jerk_rel_dev"] = report.max_jerk_rel_dev;
    doc["jerk_tolerance"] = report.jerk_tolerance;
    doc["energy_max_rel_bin_deviation"] =
        report.energy_comparison.max_rel_bin_deviation;
    doc["energy_bin_tolerance"] = report.energy_comparison.threshold;
    doc["forces_pass"] = report.forces_pass;
    doc["energy_pass"] = report.energy_pass;
    doc["pass"] = report.pass;
    return doc.dump(2) + "\n";
  }
  std::ostringstream out;
  out.precision(6);
  out << "validation over " << report.particles << " particles\n"
      << "  max acc deviation   " << std::scientific << report.max_acc_rel_dev
      << "  (tolerance " << report.acc_tolerance << ")\n"
      << "  max jerk deviation  " << report.max_jerk_rel_dev
      << "  (tolerance " << report.jerk_tolerance << ")\n"
      << "  energy histogram    " << report.energy_comparison.max_rel_bin_deviation
      << "  (tolerance " << report.energy_comparison.threshold << ", worst bin "
      << report.energy_comparison.worst_bin << ")\n"
      << "  result              " << (report.pass ? "PASS" : "FAIL") << "\n";
  return out.str();
}

std::string render_scale(const ScaleReport &report, const std::string &emit) {
  if (emit == "json") {
    json doc;
    doc["hardware_threads"] = report.hardware_threads;
    doc["workers_per_chip"] = report.workers_per_chip;
    doc["rows"] = json::array();
    for (const auto &row : report.rows) {
      doc["rows"].push_back({{"ranks", row.ranks},
                             {"time_s", row.time_s},
                             {"speedup", row.speedup},
                             {"efficiency", row.efficiency}});
    }
    return doc.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "ranks\ttime_s\tspeedup\tefficiency\n";
  out.precision(6);
  out << std::fixed;
  for (const auto &row : report.rows) {
    out << row.ranks << '\t' << row.time_s << '\t' << row.speedup << '\t'
        << row.efficiency << '\n';
  }
  out << "# " << report.workers_per_chip << " worker(s) per chip, "
      << report.hardware_threads << " hardware thread(s)\n";
  return out.str();
}

std::string render_bench(const BenchReport &report, const std::string &emit) {
  if (emit == "json") {
    json doc;
    doc["runs"] = json::array();
    for (const auto &r : report.runs) {
      doc["runs"].push_back({{"label", r.label},
                             {"time_s", r.time_to_solution_s},
                             {"energy_j", r.energy_to_solution_j},
                             {"edp_js", r.edp_js},
                             {"peak_w", r.peak_power_w},
                             {"clamped_extrapolation", r.clamped_extrapolation}});
    }
    doc["time_s"] = {{"mean", report.time_s.mean},
                     {"stddev", report.time_s.stddev}};
    doc["energy_j"] = {{"mean", report.energy_j.mean},
                       {"stddev", report.energy_j.stddev}};
    doc["edp_js"] = {{"mean", report.edp_js.mean},
                     {"stddev", report.edp_js.stddev}};
    doc["peak_w"] = {{"mean", report.peak_w.mean},
                     {"stddev", report.peak_w.stddev}};
    return doc.dump(2) + "\n";
  }
  std::ostringstream out;
  out.precision(6);
  out << "label\ttime_s\tenergy_j\tedp_js\tpeak_w\n";
  for (const auto &r : report.runs) {
    out << r.label << '\t' << r.time_to_solution_s << '\t'
        << r.energy_to_solution_j << '\t' << r.edp_js << '\t'
        << r.peak_power_w << '\n';
  }
  out << "mean\t" << report.time_s.mean << '\t' << report.energy_j.mean << '\t'
      << report.edp_js.mean << '\t' << report.peak_w.mean << '\n';
  out << "stddev\t" << report.time_s.stddev << '\t' << report.energy_j.stddev
      << '\t' << report.edp_js.stddev << '\t' << report.peak_w.stddev << '\n';
  return out.str();
}

std::string render_estimate(const TimeBreakdown &breakdown, int mode,
                            std::size_t cards, std::size_t n,
                            const std::string &emit) {
  if (emit == "json") {
    json doc;
    doc["mode"] = mode;
    doc["cards"] = cards;
    doc["particles"] = n;
    doc["compute_s"] = breakdown.compute_s;
    doc["transfer_s"] = breakdown.transfer_s;
    doc["dispatch_s"] = breakdown.dispatch_s;
    doc["total_s"] = breakdown.total();
    return doc.dump(2) + "\n";
  }
  std::ostringstream out;
  out.precision(6);
  out << std::fixed << "estimated seconds for mode " << mode << ", " << cards
      << " card(s), n=" << n << "\n"
      << "  compute   " << breakdown.compute_s << "\n"
      << "  transfer  " << breakdown.transfer_s << "\n"
      << "  dispatch  " << breakdown.dispatch_s << "\n"
      << "  total     " << breakdown.total() << "\n";
  return out.str();
}

}  // namespace gravtile
