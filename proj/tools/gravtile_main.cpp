#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "gravtile/driver.hpp"
#include "gravtile/io_util.hpp"
#include "gravtile/run_config.hpp"

namespace {

using json = nlohmann::ordered_json;

// Exit codes: 0 success, 2 configuration error, 3 validation tolerance
// failure, 4 runtime/backend error.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitValidation = 3;
constexpr int kExitRuntime = 4;

void emit_error(int code, const std::string &kind, const std::string &message) {
  json doc;
  doc["error"] = {{"code", code}, {"kind", kind}, {"message", message}};
  std::cerr << doc.dump() << std::endl;
}

/// Combine the config echo with a rendered report. For JSON emission the
/// two become one document; for tables the echo is a commented preamble.
void print_report(const gravtile::RunConfig &cfg, const std::string &key,
                  const std::string &rendered) {
  if (cfg.emit == "json") {
    json doc;
    doc["config"] = json::parse(cfg.echo_json());
    doc[key] = json::parse(rendered);
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "# effective config\n" << cfg.echo_json() << "\n" << rendered;
  }
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"direct n-body engine on a simulated tile-dataflow accelerator"};
  app.require_subcommand(1);

  std::string config_path;
  long long n = 0;
  int steps = 0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  int mode = 0, cards = 0, chips_per_card = 0, cores = 0;
  std::string backend, out_dir, emit;

  app.add_option("--config", config_path, "JSON configuration file");
  auto *opt_n = app.add_option("--n", n, "particle count");
  auto *opt_steps = app.add_option("--steps", steps, "integration steps");
  auto *opt_dt = app.add_option("--dt", dt, "time step");
  auto *opt_seed = app.add_option("--seed", seed, "random seed");
  auto *opt_mode = app.add_option("--mode", mode, "scaling mode (1, 2, or 3)");
  auto *opt_cards = app.add_option("--cards", cards, "simulated card count");
  auto *opt_chips = app.add_option("--chips-per-card", chips_per_card,
                                   "chips per card (0 = derive from mode)");
  auto *opt_cores = app.add_option("--cores", cores, "cores per chip (1-64)");
  auto *opt_backend =
      app.add_option("--backend", backend, "force backend: device | oracle");
  auto *opt_out = app.add_option("--out", out_dir, "output directory");
  auto *opt_emit = app.add_option("--emit", emit, "report format: json | table");

  auto *cmd_run =
      app.add_subcommand("run", "integrate and write snapshots + diagnostics");
  auto *cmd_validate = app.add_subcommand(
      "validate", "device backend vs 64-bit oracle deviations");
  auto *cmd_bench =
      app.add_subcommand("bench", "repeated runs with time/energy/EDP report");
  auto *cmd_scale =
      app.add_subcommand("scale", "strong-scaling sweep over rank counts");
  for (auto *cmd : {cmd_run, cmd_validate, cmd_bench, cmd_scale})
    cmd->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    emit_error(kExitConfig, "config", e.what());
    return kExitConfig;
  }

  gravtile::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = gravtile::parse_config_file(config_path);
    if (opt_n->count()) {
      if (n < 1)
        throw std::invalid_argument("config key 'particles': must be >= 1");
      cfg.particles = static_cast<std::size_t>(n);
    }
    if (opt_steps->count()) cfg.steps = steps;
    if (opt_dt->count()) cfg.dt = dt;
    if (opt_seed->count()) cfg.seed = seed;
    if (opt_mode->count()) cfg.mode = mode;
    if (opt_cards->count()) cfg.cards = cards;
    if (opt_chips->count()) cfg.chips_per_card = chips_per_card;
    if (opt_cores->count()) cfg.cores = cores;
    if (opt_backend->count()) cfg.backend = backend;
    if (opt_out->count()) cfg.out_dir = out_dir;
    if (opt_emit->count()) cfg.emit = emit;
    cfg.validate();
  } catch (const std::exception &e) {
    emit_error(kExitConfig, "config", e.what());
    return kExitConfig;
  }

  try {
    if (*cmd_run) {
      const gravtile::RunResult result = gravtile::run_simulation(cfg);
      json report;
      report["files"] = result.files_written;
      report["final_time"] = result.final_system.time;
      if (!result.diagnostics.steps.empty()) {
        const auto &last = result.diagnostics.steps.back();
        report["final_total_energy"] = last.total_energy;
      }
      report["eval_seconds_total"] = result.diagnostics.eval_seconds_total;
      print_report(cfg, "run", report.dump(2));
    } else if (*cmd_validate) {
      const gravtile::ValidationReport report = gravtile::run_validation(cfg);
      print_report(cfg, "validation",
                   gravtile::render_validation(report, cfg.emit));
      if (!report.pass) {
        emit_error(kExitValidation, "validation",
                   "deviation exceeds tolerance (acc " +
                       std::to_string(report.max_acc_rel_dev) + ", jerk " +
                       std::to_string(report.max_jerk_rel_dev) +
                       ", energy bins " +
                       std::to_string(
                           report.energy_comparison.max_rel_bin_deviation) +
                       ")");
        return kExitValidation;
      }
    } else if (*cmd_bench) {
      const gravtile::BenchResult result = gravtile::run_benchmark(cfg);
      print_report(cfg, "bench", gravtile::render_bench(result.report, cfg.emit));
    } else if (*cmd_scale) {
      const gravtile::ScaleReport report = gravtile::run_scale_sweep(cfg);
      print_report(cfg, "scale", gravtile::render_scale(report, cfg.emit));
      std::filesystem::create_directories(cfg.out_dir);
      gravtile::atomic_write_file(
          std::filesystem::path(cfg.out_dir) / "scale_table.tsv",
          gravtile::render_scale(report, "table"));
    }
  } catch (const std::invalid_argument &e) {
    emit_error(kExitConfig, "config", e.what());
    return kExitConfig;
  } catch (const std::exception &e) {
    emit_error(kExitRuntime, "runtime", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}
