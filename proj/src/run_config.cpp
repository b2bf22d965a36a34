#include "gravtile/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "json.hpp"

#include "gravtile/io_util.hpp"

namespace gravtile {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string &key, const std::string &what) {
  throw std::invalid_argument("config key '" + key + "': " + what);
}

void expect_known_keys(const json &obj, const std::string &scope,
                       std::initializer_list<const char *> known) {
  for (const auto &item : obj.items()) {
    if (std::find_if(known.begin(), known.end(), [&](const char *k) {
          return item.key() == k;
        }) == known.end()) {
      const std::string full =
          scope.empty() ? item.key() : scope + "." + item.key();
      throw std::invalid_argument("unknown config key '" + full + "'");
    }
  }
}

long long get_integer(const json &obj, const std::string &key,
                      long long fallback) {
  if (!obj.contains(key)) return fallback;
  const auto &v = obj.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    fail(key, "expected an integer");
  return v.get<long long>();
}

double get_number(const json &obj, const std::string &key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto &v = obj.at(key);
  if (!v.is_number()) fail(key, "expected a number");
  return v.get<double>();
}

std::string get_string(const json &obj, const std::string &key,
                       const std::string &fallback) {
  if (!obj.contains(key)) return fallback;
  const auto &v = obj.at(key);
  if (!v.is_string()) fail(key, "expected a string");
  return v.get<std::string>();
}

}  // namespace

void RunConfig::validate() const {
  if (particles < 1) fail("particles", "must be >= 1");
  if (steps < 0) fail("steps", "must be >= 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt", "must be positive");
  if (ic_model != "uniform-sphere" && ic_model != "cold-uniform")
    fail("ic_model", "expected 'uniform-sphere' or 'cold-uniform'");
  if (order != "hermite4" && order != "hermite6")
    fail("order", "expected 'hermite4' or 'hermite6'");
  if (backend != "device" && backend != "oracle")
    fail("backend", "expected 'device' or 'oracle'");
  if (mode < 1 || mode > 3) fail("mode", "must be 1, 2, or 3");
  if (cards < 1) fail("cards", "must be >= 1");
  if (chips_per_card != 0 && chips_per_card != effective_chips_per_card())
    fail("chips_per_card",
         "mode " + std::to_string(mode) + " uses " +
             std::to_string(effective_chips_per_card()) +
             " chip(s) per card (or 0 to derive)");
  if (cores < 1 || cores > 64) fail("cores", "must be in [1, 64]");
  if (pool < 0) fail("pool", "must be >= 0 (0 = auto)");
  if (!(pcie.bandwidth_bytes_per_s > 0.0))
    fail("links.pcie_bandwidth_bytes_per_s", "must be positive");
  if (pcie.latency_s < 0.0) fail("links.pcie_latency_s", "must be >= 0");
  if (!(eth.bandwidth_bytes_per_s > 0.0))
    fail("links.eth_bandwidth_bytes_per_s", "must be positive");
  if (eth.latency_s < 0.0) fail("links.eth_latency_s", "must be >= 0");
  if (!(perf.tile_pairs_per_second > 0.0))
    fail("perf.tile_pairs_per_second", "must be positive");
  if (perf.dispatch_s_per_step < 0.0)
    fail("perf.dispatch_s_per_step", "must be >= 0");
  if (perf.mesh_overhead_s_per_command < 0.0)
    fail("perf.mesh_overhead_s_per_command", "must be >= 0");
  if (perf.mesh_commands_per_device_per_step < 0)
    fail("perf.mesh_commands_per_device_per_step", "must be >= 0");
  if (repetitions < 1) fail("repetitions", "must be >= 1");
  if (power.host_idle_w < 0.0) fail("power.host_idle_w", "must be >= 0");
  if (power.chip_active_w < 0.0) fail("power.chip_active_w", "must be >= 0");
  if (power.chip_idle_w < 0.0) fail("power.chip_idle_w", "must be >= 0");
  if (!(power.sample_hz > 0.0)) fail("power.sample_hz", "must be positive");
  if (power.quiescence_s < 0.0) fail("power.quiescence_s", "must be >= 0");
  if (scale_ranks.empty()) fail("scale_ranks", "must list at least one rank count");
  for (int r : scale_ranks)
    if (r < 1) fail("scale_ranks", "rank counts must be >= 1");
  if (histogram_bins < 1) fail("histogram_bins", "must be >= 1");
  if (!(acc_tolerance > 0.0)) fail("tolerances.acc", "must be positive");
  if (!(jerk_tolerance > 0.0)) fail("tolerances.jerk", "must be positive");
  if (!(energy_bin_tolerance > 0.0))
    fail("tolerances.energy_bin", "must be positive");
  if (out_dir.empty()) fail("out_dir", "must not be empty");
  if (emit != "table" && emit != "json")
    fail("emit", "expected 'table' or 'json'");
}

RunConfig parse_config_text(const std::string &text, const RunConfig &base) {
  RunConfig cfg = base;
  std::string trimmed = text;
  trimmed.erase(0, trimmed.find_first_not_of(" \t\r\n"));
  if (!trimmed.empty()) {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error &e) {
      throw std::invalid_argument(std::string("config is not valid JSON: ") +
                                  e.what());
    }
    if (!doc.is_object())
      throw std::invalid_argument("config root must be a JSON object");
    expect_known_keys(
        doc, "",
        {"particles", "steps", "dt", "seed", "ic_model", "order", "backend",
         "mode", "cards", "chips_per_card", "cores", "pool", "links", "perf",
         "repetitions", "power", "trace_paths", "scale_ranks",
         "histogram_bins", "tolerances", "out_dir", "emit"});

    const long long n = get_integer(doc, "particles",
                                    static_cast<long long>(cfg.particles));
    if (n < 0) fail("particles", "must be >= 1");
    cfg.particles = static_cast<std::size_t>(n);
    cfg.steps = static_cast<int>(get_integer(doc, "steps", cfg.steps));
    cfg.dt = get_number(doc, "dt", cfg.dt);
    const long long seed =
        get_integer(doc, "seed", static_cast<long long>(cfg.seed));
    if (seed < 0) fail("seed", "must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.ic_model = get_string(doc, "ic_model", cfg.ic_model);
    cfg.order = get_string(doc, "order", cfg.order);
    cfg.backend = get_string(doc, "backend", cfg.backend);
    cfg.mode = static_cast<int>(get_integer(doc, "mode", cfg.mode));
    cfg.cards = static_cast<int>(get_integer(doc, "cards", cfg.cards));
    cfg.chips_per_card = static_cast<int>(
        get_integer(doc, "chips_per_card", cfg.chips_per_card));
    cfg.cores = static_cast<int>(get_integer(doc, "cores", cfg.cores));
    cfg.pool = static_cast<int>(get_integer(doc, "pool", cfg.pool));

    if (doc.contains("links")) {
      const auto &links = doc.at("links");
      if (!links.is_object()) fail("links", "expected an object");
      expect_known_keys(links, "links",
                        {"pcie_bandwidth_bytes_per_s", "pcie_latency_s",
                         "eth_bandwidth_bytes_per_s", "eth_latency_s"});
      cfg.pcie.bandwidth_bytes_per_s = get_number(
          links, "pcie_bandwidth_bytes_per_s", cfg.pcie.bandwidth_bytes_per_s);
      cfg.pcie.latency_s =
          get_number(links, "pcie_latency_s", cfg.pcie.latency_s);
      cfg.eth.bandwidth_bytes_per_s = get_number(
          links, "eth_bandwidth_bytes_per_s", cfg.eth.bandwidth_bytes_per_s);
      cfg.eth.latency_s = get_number(links, "eth_latency_s", cfg.eth.latency_s);
    }
    if (doc.contains("perf")) {
      const auto &perf = doc.at("perf");
      if (!perf.is_object()) fail("perf", "expected an object");
      expect_known_keys(perf, "perf",
                        {"tile_pairs_per_second", "dispatch_s_per_step",
                         "mesh_overhead_s_per_command",
                         "mesh_commands_per_device_per_step"});
      cfg.perf.tile_pairs_per_second = get_number(
          perf, "tile_pairs_per_second", cfg.perf.tile_pairs_per_second);
      cfg.perf.dispatch_s_per_step = get_number(perf, "dispatch_s_per_step",
                                                cfg.perf.dispatch_s_per_step);
      cfg.perf.mesh_overhead_s_per_command =
          get_number(perf, "mesh_overhead_s_per_command",
                     cfg.perf.mesh_overhead_s_per_command);
      cfg.perf.mesh_commands_per_device_per_step = static_cast<int>(
          get_integer(perf, "mesh_commands_per_device_per_step",
                      cfg.perf.mesh_commands_per_device_per_step));
    }

    cfg.repetitions =
        static_cast<int>(get_integer(doc, "repetitions", cfg.repetitions));
    if (doc.contains("power")) {
      const auto &power = doc.at("power");
      if (!power.is_object()) fail("power", "expected an object");
      expect_known_keys(power, "power",
                        {"host_idle_w", "chip_active_w", "chip_idle_w",
                         "sample_hz", "quiescence_s"});
      cfg.power.host_idle_w =
          get_number(power, "host_idle_w", cfg.power.host_idle_w);
      cfg.power.chip_active_w =
          get_number(power, "chip_active_w", cfg.power.chip_active_w);
      cfg.power.chip_idle_w =
          get_number(power, "chip_idle_w", cfg.power.chip_idle_w);
      cfg.power.sample_hz = get_number(power, "sample_hz", cfg.power.sample_hz);
      cfg.power.quiescence_s =
          get_number(power, "quiescence_s", cfg.power.quiescence_s);
    }
    if (doc.contains("trace_paths")) {
      const auto &paths = doc.at("trace_paths");
      if (!paths.is_array()) fail("trace_paths", "expected an array of paths");
      cfg.trace_paths.clear();
      for (const auto &p : paths) {
        if (!p.is_string()) fail("trace_paths", "entries must be strings");
        cfg.trace_paths.push_back(p.get<std::string>());
      }
    }
    if (doc.contains("scale_ranks")) {
      const auto &ranks = doc.at("scale_ranks");
      if (!ranks.is_array()) fail("scale_ranks", "expected an array of integers");
      cfg.scale_ranks.clear();
      for (const auto &r : ranks) {
        if (!r.is_number_integer() && !r.is_number_unsigned())
          fail("scale_ranks", "entries must be integers");
        cfg.scale_ranks.push_back(r.get<int>());
      }
    }
    const long long bins = get_integer(
        doc, "histogram_bins", static_cast<long long>(cfg.histogram_bins));
    if (bins < 0) fail("histogram_bins", "must be >= 1");
    cfg.histogram_bins = static_cast<std::size_t>(bins);
    if (doc.contains("tolerances")) {
      const auto &tol = doc.at("tolerances");
      if (!tol.is_object()) fail("tolerances", "expected an object");
      expect_known_keys(tol, "tolerances", {"acc", "jerk", "energy_bin"});
      cfg.acc_tolerance = get_number(tol, "acc", cfg.acc_tolerance);
      cfg.jerk_tolerance = get_number(tol, "jerk", cfg.jerk_tolerance);
      cfg.energy_bin_tolerance =
          get_number(tol, "energy_bin", cfg.energy_bin_tolerance);
    }
    cfg.out_dir = get_string(doc, "out_dir", cfg.out_dir);
    cfg.emit = get_string(doc, "emit", cfg.emit);
  }

  for (const auto &p : cfg.trace_paths) {
    if (!std::filesystem::exists(p))
      fail("trace_paths", "file does not exist: " + p);
  }
  cfg.validate();
  return cfg;
}

RunConfig parse_config_file(const std::string &path, const RunConfig &base) {
  return parse_config_text(read_file(path), base);
}

std::string RunConfig::echo_json() const {
  json doc;
  doc["particles"] = particles;
  doc["steps"] = steps;
  doc["dt"] = dt;
  doc["seed"] = seed;
  doc["ic_model"] = ic_model;
  doc["order"] = order;
  doc["backend"] = backend;
  doc["mode"] = mode;
  doc["cards"] = cards;
  doc["chips_per_card"] = effective_chips_per_card();
  doc["cores"] = cores;
  doc["pool"] = pool;
  doc["links"] = {{"pcie_bandwidth_bytes_per_s", pcie.bandwidth_bytes_per_s},
                  {"pcie_latency_s", pcie.latency_s},
                  {"eth_bandwidth_bytes_per_s", eth.bandwidth_bytes_per_s},
                  {"eth_latency_s", eth.latency_s}};
  doc["perf"] = {{"tile_pairs_per_second", perf.tile_pairs_per_second},
                 {"dispatch_s_per_step", perf.dispatch_s_per_step},
                 {"mesh_overhead_s_per_command", perf.mesh_overhead_s_per_command},
                 {"mesh_commands_per_device_per_step",
                  perf.mesh_commands_per_device_per_step}};
  doc["repetitions"] = repetitions;
  doc["power"] = {{"host_idle_w", power.host_idle_w},
                  {"chip_active_w", power.chip_active_w},
                  {"chip_idle_w", power.chip_idle_w},
                  {"sample_hz", power.sample_hz},
                  {"quiescence_s", power.quiescence_s}};
  doc["trace_paths"] = trace_paths;
  doc["scale_ranks"] = scale_ranks;
  doc["histogram_bins"] = histogram_bins;
  doc["tolerances"] = {{"acc", acc_tolerance},
                       {"jerk", jerk_tolerance},
                       {"energy_bin", energy_bin_tolerance}};
  doc["out_dir"] = out_dir;
  doc["emit"] = emit;
  return doc.dump(2) + "\n";
}

ClusterConfig RunConfig::make_cluster_config() const {
  validate();
  ClusterConfig cluster = make_cluster(
      static_cast<std::size_t>(cards), static_cast<ScalingMode>(mode), cores);
  cluster.pcie = pcie;
  for (auto &card : cluster.cards) card.eth = eth;
  cluster.perf = perf;
  cluster.pool_runners_per_chip = static_cast<unsigned>(pool);
  return cluster;
}

}  // namespace gravtile
