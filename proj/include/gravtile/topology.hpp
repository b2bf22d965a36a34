#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "gravtile/particle_system.hpp"
#include "gravtile/sim_chip.hpp"

namespace gravtile {

/// The three multi-device placements. Every card carries two chips: the
/// L-chip talks to the host over PCIe; the R-chip is reachable only through
/// its card's L-chip over an Ethernet link.
enum class ScalingMode {
  MultiHostSingleChip = 1,  // one rank per card, L-chips only
  MultiHostMultiChip = 2,   // one rank per card, both chips, explicit split
  MeshSharded = 3,          // both chips behind a mesh facade: same split,
                            // sharded-buffer bookkeeping, per-command overhead
};

struct LinkParams {
  double bandwidth_bytes_per_s = 0.0;
  double latency_s = 0.0;
};

/// Analytic cost-model knobs. Defaults are calibrated so the published
/// four-configuration ordering holds with clear separation (two cards beat
/// one, one chip per card beats two, the mesh trails by >6x) — absolute
/// seconds are illustrative, not measurements.
struct PerfParams {
  double tile_pairs_per_second = 1.744e6;  // per-chip pipeline throughput
  double dispatch_s_per_step = 392.5;      // per-rank serial overhead per step
  double mesh_overhead_s_per_command = 337.5;
  int mesh_commands_per_device_per_step = 4;  // 2 writes + program + read
};

struct Card {
  std::unique_ptr<SimChip> l_chip;
  std::unique_ptr<SimChip> r_chip;
  LinkParams eth;
};

struct ClusterConfig {
  std::vector<Card> cards;
  LinkParams pcie{16.0e9, 50.0e-6};
  ScalingMode mode = ScalingMode::MultiHostSingleChip;
  int core_count = SimChip::kMaxCores;
  unsigned pool_runners_per_chip = 0;  // 0: host threads / active chips
  PerfParams perf;

  std::size_t ranks() const { return cards.size(); }  // one rank per card
  std::size_t active_chips() const {
    return cards.size() * (mode == ScalingMode::MultiHostSingleChip ? 1 : 2);
  }
};

/// Build a cluster of `cards` cards with fresh chips and default links.
ClusterConfig make_cluster(std::size_t cards, ScalingMode mode,
                           int core_count = SimChip::kMaxCores);

/// One device's share of the decomposition.
struct DevicePlacement {
  std::size_t card = 0;
  bool on_r_chip = false;
  std::size_t begin = 0, end = 0;
  bool sharded = false;             // mesh bookkeeping label
  bool replicated_targets = true;   // every device sees the full target set
  std::size_t size() const { return end - begin; }
};

/// Split n particles over the configured devices: evenly over ranks, and
/// for the two-chip modes evenly again over each card's L/R pair. Ranges
/// are contiguous, disjoint, and cover [0, n).
std::vector<DevicePlacement> decompose(ScalingMode mode, std::size_t n,
                                       const ClusterConfig &cluster);

/// Run the force program for every placement (one worker per rank; ranks
/// execute concurrently, a rank's own devices in enqueue order) and gather
/// the slices in index order. The fold order inside the kernels is fixed,
/// so the result is bit-identical across modes, card counts, and core
/// counts. Device failures carry rank and chip attribution.
void execute_evaluation(ClusterConfig &cluster, const ParticleSystem &system,
                        std::vector<Vec3> &acc, std::vector<Vec3> &jerk);

/// Analytic time estimate for a `steps`-step run at size n.
struct TimeBreakdown {
  double compute_s = 0.0;
  double transfer_s = 0.0;
  double dispatch_s = 0.0;
  double total() const { return compute_s + transfer_s + dispatch_s; }
};

/// Per-rank cost, maximized over ranks (ranks run concurrently):
///  - compute: pair tiles of the rank's largest device slice / throughput
///    (a rank's devices compute concurrently; enqueues are non-blocking)
///  - transfer: per device, per step: write 6 source tiles per slice group
///    plus 7 replicated target-column tiles per full-system group, read 6
///    output tiles per slice group. All bytes cross PCIe (one latency per
///    buffer command); R-chip bytes additionally cross the card's Ethernet
///    link, which forwards tile by tile (one latency per 4 KiB tile).
///  - dispatch: per-step per-rank constant; the mesh additionally pays a
///    per-command runtime overhead on every device command.
/// Throws std::invalid_argument if throughput is not positive.
TimeBreakdown estimate_time(const ClusterConfig &cluster, std::size_t n,
                            int steps = 3);

}  // namespace gravtile
