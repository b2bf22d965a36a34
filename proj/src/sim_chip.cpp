#include "gravtile/sim_chip.hpp"

#include <atomic>
#include <cstring>
#include <stdexcept>
#include <thread>

#include "gravtile/pipeline.hpp"

namespace gravtile {

std::vector<TileRange> split_work_to_cores(std::size_t num_tiles,
                                           std::size_t num_cores) {
  if (num_cores < 1) {
    throw std::invalid_argument("split_work_to_cores: need at least one core");
  }
  const std::size_t base = num_tiles / num_cores;
  const std::size_t extra = num_tiles % num_cores;
  std::vector<TileRange> ranges(num_cores);
  std::size_t cursor = 0;
  for (std::size_t c = 0; c < num_cores; ++c) {
    const std::size_t len = base + (c < extra ? 1 : 0);
    ranges[c] = TileRange{cursor, cursor + len};
    cursor += len;
  }
  return ranges;
}

SimChip::SimChip(int core_count) : core_count_(core_count) {
  if (core_count_ < 1 || core_count_ > kMaxCores) {
    throw std::invalid_argument("sim chip: core count must be in [1, " +
                                std::to_string(kMaxCores) + "]");
  }
}

void SimChip::create_buffer(const std::string &key, std::size_t bytes) {
  std::lock_guard<std::mutex> lock(mu_);
  dram_[key].assign(bytes, 0);
}

void SimChip::enqueue_write_buffer(const std::string &key,
                                   std::vector<std::uint8_t> bytes) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = dram_.find(key);
  if (it == dram_.end()) {
    throw std::runtime_error("sim chip: write to unknown buffer '" + key + "'");
  }
  if (it->second.size() != bytes.size()) {
    throw std::runtime_error("sim chip: write of " +
                             std::to_string(bytes.size()) + " bytes to '" +
                             key + "' sized " +
                             std::to_string(it->second.size()));
  }
  Command cmd;
  cmd.write_key = key;
  cmd.write_bytes = std::move(bytes);
  queue_.push_back(std::move(cmd));
}

void SimChip::enqueue_program(std::function<void(SimChip &)> program) {
  std::lock_guard<std::mutex> lock(mu_);
  Command cmd;
  cmd.program = std::move(program);
  queue_.push_back(std::move(cmd));
}

void SimChip::drain() {
  for (;;) {
    Command cmd;
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (queue_.empty()) return;
      cmd = std::move(queue_.front());
      queue_.erase(queue_.begin());
    }
    if (cmd.program) {
      cmd.program(*this);
    } else {
      std::lock_guard<std::mutex> lock(mu_);
      auto &buf = dram_.at(cmd.write_key);
      log_.host_to_device_bytes += cmd.write_bytes.size();
      log_.write_commands += 1;
      buf = std::move(cmd.write_bytes);
    }
  }
}

std::vector<std::uint8_t> SimChip::enqueue_read_buffer(const std::string &key) {
  drain();
  std::lock_guard<std::mutex> lock(mu_);
  auto it = dram_.find(key);
  if (it == dram_.end()) {
    throw std::runtime_error("sim chip: read of unknown buffer '" + key + "'");
  }
  log_.device_to_host_bytes += it->second.size();
  log_.read_commands += 1;
  return it->second;
}

void SimChip::finish() { drain(); }

std::vector<std::uint8_t> &SimChip::buffer(const std::string &key) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = dram_.find(key);
  if (it == dram_.end()) {
    throw std::runtime_error("sim chip: unknown buffer '" + key + "'");
  }
  return it->second;
}

namespace {

void tile_to_bytes(const Tile &t, std::uint8_t *dst) {
  std::memcpy(dst, t.lanes.data(), Tile::kBytes);
}

Tile tile_from_bytes(const std::uint8_t *src) {
  Tile t;
  std::memcpy(t.lanes.data(), src, Tile::kBytes);
  return t;
}

// Buffer layouts: "src" holds 6 attribute tiles per source group in
// (x,y,z,vx,vy,vz) order; "tgt" holds 7 column tiles per target group in
// (x,y,z,vx,vy,vz,w) order; "out" holds 6 accumulator tiles per source
// group in (ax,ay,az,jx,jy,jz) order.

std::vector<std::uint8_t> serialize_source(const TiledWorkload &w) {
  std::vector<std::uint8_t> bytes(w.source_tiles.size() * 6 * Tile::kBytes);
  std::uint8_t *p = bytes.data();
  for (const SourceTileGroup &g : w.source_tiles) {
    for (const Tile *t : {&g.x, &g.y, &g.z, &g.vx, &g.vy, &g.vz}) {
      tile_to_bytes(*t, p);
      p += Tile::kBytes;
    }
  }
  return bytes;
}

std::vector<std::uint8_t> serialize_targets(const TiledWorkload &w) {
  std::vector<std::uint8_t> bytes(w.target_columns.size() * 7 * Tile::kBytes);
  std::uint8_t *p = bytes.data();
  for (const TargetColumnGroup &g : w.target_columns) {
    for (const Tile *t : {&g.x, &g.y, &g.z, &g.vx, &g.vy, &g.vz, &g.w}) {
      tile_to_bytes(*t, p);
      p += Tile::kBytes;
    }
  }
  return bytes;
}

TiledWorkload deserialize_workload(const std::vector<std::uint8_t> &src,
                                   const std::vector<std::uint8_t> &tgt,
                                   std::size_t n_slice, std::size_t n_targets,
                                   float softening_sq) {
  TiledWorkload w;
  w.n_slice = n_slice;
  w.n_targets = n_targets;
  w.softening_sq = softening_sq;
  const std::size_t src_groups = src.size() / (6 * Tile::kBytes);
  const std::size_t tgt_groups = tgt.size() / (7 * Tile::kBytes);
  w.source_tiles.resize(src_groups);
  w.target_columns.resize(tgt_groups);
  const std::uint8_t *p = src.data();
  for (SourceTileGroup &g : w.source_tiles) {
    for (Tile *t : {&g.x, &g.y, &g.z, &g.vx, &g.vy, &g.vz}) {
      *t = tile_from_bytes(p);
      p += Tile::kBytes;
    }
  }
  p = tgt.data();
  for (TargetColumnGroup &g : w.target_columns) {
    for (Tile *t : {&g.x, &g.y, &g.z, &g.vx, &g.vy, &g.vz, &g.w}) {
      *t = tile_from_bytes(p);
      p += Tile::kBytes;
    }
  }
  w.core_range = TileRange{0, src_groups};
  return w;
}

}  // namespace

ForceResult run_force_program(SimChip &chip, const ParticleSystem &system,
                              std::size_t begin, std::size_t end,
                              unsigned pool_runners) {
  ForceResult result;
  if (begin == end) return result;

  const TiledWorkload host_workload = tilize_slice(system, begin, end);
  const std::size_t n_slice = host_workload.n_slice;
  const std::size_t n_targets = host_workload.n_targets;
  const float softening_sq = host_workload.softening_sq;
  const std::size_t num_tiles = host_workload.num_source_tiles();

  chip.create_buffer("src", num_tiles * 6 * Tile::kBytes);
  chip.create_buffer("tgt", host_workload.target_columns.size() * 7 * Tile::kBytes);
  chip.create_buffer("out", num_tiles * 6 * Tile::kBytes);

  chip.enqueue_write_buffer("src", serialize_source(host_workload));
  chip.enqueue_write_buffer("tgt", serialize_targets(host_workload));

  if (pool_runners == 0) {
    pool_runners = std::max(1u, std::thread::hardware_concurrency());
  }

  chip.enqueue_program([=](SimChip &dev) {
    const TiledWorkload workload = deserialize_workload(
        dev.buffer("src"), dev.buffer("tgt"), n_slice, n_targets, softening_sq);
    const auto ranges =
        split_work_to_cores(num_tiles, static_cast<std::size_t>(dev.core_count()));

    std::vector<std::size_t> active;
    for (std::size_t c = 0; c < ranges.size(); ++c) {
      if (!ranges[c].empty()) active.push_back(c);
    }

    std::vector<AccumTiles> out_groups(num_tiles);
    std::atomic<std::size_t> cursor{0};
    std::mutex err_mu;
    std::exception_ptr first_err;
    std::string err_core;

    auto runner = [&] {
      for (;;) {
        const std::size_t k = cursor.fetch_add(1);
        if (k >= active.size()) return;
        const std::size_t core = active[k];
        try {
          run_core_pipeline(workload, ranges[core], out_groups, 0);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!first_err) {
            first_err = std::current_exception();
            err_core = std::to_string(core);
          }
        }
      }
    };

    const unsigned runners =
        std::min<std::size_t>(pool_runners, active.size());
    std::vector<std::thread> pool;
    for (unsigned r = 1; r < runners; ++r) pool.emplace_back(runner);
    runner();
    for (auto &th : pool) th.join();

    if (first_err) {
      try {
        std::rethrow_exception(first_err);
      } catch (const std::exception &e) {
        throw std::runtime_error("core " + err_core + ": " + e.what());
      }
    }

    auto &out = dev.buffer("out");
    std::uint8_t *p = out.data();
    for (const AccumTiles &g : out_groups) {
      for (const Tile *t : {&g.ax, &g.ay, &g.az, &g.jx, &g.jy, &g.jz}) {
        tile_to_bytes(*t, p);
        p += Tile::kBytes;
      }
    }
  });

  const std::vector<std::uint8_t> out_bytes = chip.enqueue_read_buffer("out");
  std::vector<AccumTiles> out_groups(num_tiles);
  const std::uint8_t *p = out_bytes.data();
  for (AccumTiles &g : out_groups) {
    for (Tile *t : {&g.ax, &g.ay, &g.az, &g.jx, &g.jy, &g.jz}) {
      *t = tile_from_bytes(p);
      p += Tile::kBytes;
    }
  }
  untilize_forces(out_groups, n_slice, result.acc, result.jerk);
  return result;
}

}  // namespace gravtile
