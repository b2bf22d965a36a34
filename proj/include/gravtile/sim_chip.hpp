#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "gravtile/particle_system.hpp"
#include "gravtile/workload.hpp"

namespace gravtile {

/// Contiguous per-core tile ranges: the first (num_tiles mod num_cores)
/// cores receive the ceiling share, the rest the floor share; ranges are
/// disjoint, ordered, and exactly cover [0, num_tiles). Cores past the tile
/// count receive empty ranges.
std::vector<TileRange> split_work_to_cores(std::size_t num_tiles,
                                           std::size_t num_cores);

/// Bytes moved across the host link, for the cost model and its tests.
struct TransferLog {
  std::uint64_t host_to_device_bytes = 0;
  std::uint64_t device_to_host_bytes = 0;
  std::uint64_t write_commands = 0;
  std::uint64_t read_commands = 0;
};

/// A simulated accelerator chip: a keyed DRAM buffer store and an in-order
/// deferred command queue. Write and program commands queue up without
/// executing; a read or an explicit finish() drains the queue, so reads
/// always observe the effects of every earlier command (and two writes to
/// one buffer resolve last-writer-wins).
class SimChip {
 public:
  static constexpr int kMaxCores = 64;

  explicit SimChip(int core_count = kMaxCores);

  SimChip(const SimChip &) = delete;
  SimChip &operator=(const SimChip &) = delete;

  int core_count() const { return core_count_; }

  /// Buffers must be created (and thereby sized) before any write or read.
  void create_buffer(const std::string &key, std::size_t bytes);

  /// Queue a full-buffer write; content must match the created size.
  void enqueue_write_buffer(const std::string &key,
                            std::vector<std::uint8_t> bytes);

  /// Queue a program; it runs with direct access to the buffer store.
  void enqueue_program(std::function<void(SimChip &)> program);

  /// Drain the queue, then return the buffer's content.
  std::vector<std::uint8_t> enqueue_read_buffer(const std::string &key);

  /// Completion fence: drain the queue without transferring anything.
  void finish();

  /// Buffer access for programs (and post-fence inspection).
  std::vector<std::uint8_t> &buffer(const std::string &key);

  const TransferLog &transfer_log() const { return log_; }
  void reset_transfer_log() { log_ = TransferLog{}; }

 private:
  struct Command {
    // exactly one of the two is active
    std::string write_key;
    std::vector<std::uint8_t> write_bytes;
    std::function<void(SimChip &)> program;
  };

  void drain();

  int core_count_;
  std::map<std::string, std::vector<std::uint8_t>> dram_;
  std::vector<Command> queue_;
  TransferLog log_;
  std::mutex mu_;  // guards dram_ keys and queue_ bookkeeping
};

struct ForceResult {
  std::vector<Vec3> acc;
  std::vector<Vec3> jerk;
};

/// Evaluate acceleration and jerk for the contiguous slice [begin, end) of
/// `system` on one chip: tilize, stage through DRAM buffers, run the
/// read/compute/write pipeline on every core with an assigned tile range
/// (a bounded pool of `pool_runners` host threads serves the logical
/// cores; 0 means one runner per available hardware thread), read back and
/// untilize. Pipeline failures carry the core index.
ForceResult run_force_program(SimChip &chip, const ParticleSystem &system,
                              std::size_t begin, std::size_t end,
                              unsigned pool_runners = 0);

}  // namespace gravtile
