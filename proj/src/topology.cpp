#include "gravtile/topology.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "gravtile/tile.hpp"

namespace gravtile {

namespace {

// Even contiguous split of [0, n): first (n mod k) parts get the ceiling.
std::vector<std::pair<std::size_t, std::size_t>> even_split(std::size_t n,
                                                            std::size_t k) {
  std::vector<std::pair<std::size_t, std::size_t>> parts(k);
  const std::size_t base = n / k;
  const std::size_t extra = n % k;
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t len = base + (i < extra ? 1 : 0);
    parts[i] = {cursor, cursor + len};
    cursor += len;
  }
  return parts;
}

std::size_t tiles_for(std::size_t particles) {
  return (particles + Tile::kLanes - 1) / Tile::kLanes;
}

}  // namespace

ClusterConfig make_cluster(std::size_t cards, ScalingMode mode,
                           int core_count) {
  if (cards < 1) {
    throw std::invalid_argument("cluster: need at least one card");
  }
  ClusterConfig c;
  c.mode = mode;
  c.core_count = core_count;
  c.cards.reserve(cards);
  for (std::size_t i = 0; i < cards; ++i) {
    Card card;
    card.l_chip = std::make_unique<SimChip>(core_count);
    card.r_chip = std::make_unique<SimChip>(core_count);
    card.eth = LinkParams{1.25e9, 12.5e-3};
    c.cards.push_back(std::move(card));
  }
  return c;
}

std::vector<DevicePlacement> decompose(ScalingMode mode, std::size_t n,
                                       const ClusterConfig &cluster) {
  if (n < 1) {
    throw std::invalid_argument("decompose: need at least one particle");
  }
  std::vector<DevicePlacement> placements;
  const auto rank_parts = even_split(n, cluster.ranks());
  for (std::size_t card = 0; card < rank_parts.size(); ++card) {
    const auto [rb, re] = rank_parts[card];
    if (mode == ScalingMode::MultiHostSingleChip) {
      placements.push_back(DevicePlacement{card, false, rb, re, false, true});
      continue;
    }
    const auto chip_parts = even_split(re - rb, 2);
    const bool sharded = mode == ScalingMode::MeshSharded;
    placements.push_back(DevicePlacement{
        card, false, rb + chip_parts[0].first, rb + chip_parts[0].second,
        sharded, true});
    placements.push_back(DevicePlacement{
        card, true, rb + chip_parts[1].first, rb + chip_parts[1].second,
        sharded, true});
  }
  return placements;
}

void execute_evaluation(ClusterConfig &cluster, const ParticleSystem &system,
                        std::vector<Vec3> &acc, std::vector<Vec3> &jerk) {
  const std::size_t n = system.size();
  acc.assign(n, Vec3{0.0, 0.0, 0.0});
  jerk.assign(n, Vec3{0.0, 0.0, 0.0});

  const auto placements = decompose(cluster.mode, n, cluster);

  unsigned pool = cluster.pool_runners_per_chip;
  if (pool == 0) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    pool = std::max<unsigned>(
        1, hw / static_cast<unsigned>(std::max<std::size_t>(
               1, cluster.active_chips())));
  }

  std::mutex err_mu;
  std::exception_ptr first_err;
  std::string err_where;

  auto rank_worker = [&](std::size_t card) {
    for (const DevicePlacement &p : placements) {
      if (p.card != card || p.size() == 0) continue;
      SimChip &chip = p.on_r_chip ? *cluster.cards[card].r_chip
                                  : *cluster.cards[card].l_chip;
      try {
        ForceResult r = run_force_program(chip, system, p.begin, p.end, pool);
        for (std::size_t i = 0; i < p.size(); ++i) {
          acc[p.begin + i] = r.acc[i];
          jerk[p.begin + i] = r.jerk[i];
        }
      } catch (const std::exception &e) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_err) {
          first_err = std::current_exception();
          err_where = "rank " + std::to_string(card) +
                      (p.on_r_chip ? " (R chip)" : " (L chip)");
        }
        return;
      }
    }
  };

  std::vector<std::thread> ranks;
  for (std::size_t card = 1; card < cluster.cards.size(); ++card) {
    ranks.emplace_back(rank_worker, card);
  }
  rank_worker(0);
  for (auto &t : ranks) t.join();

  if (first_err) {
    try {
      std::rethrow_exception(first_err);
    } catch (const std::exception &e) {
      throw std::runtime_error(err_where + ": " + e.what());
    }
  }
}

TimeBreakdown estimate_time(const ClusterConfig &cluster, std::size_t n,
                            int steps) {
  const PerfParams &perf = cluster.perf;
  if (!(perf.tile_pairs_per_second > 0.0)) {
    throw std::invalid_argument("estimate_time: throughput must be positive");
  }
  if (steps < 0) {
    throw std::invalid_argument("estimate_time: steps must be non-negative");
  }

  const auto placements = decompose(cluster.mode, n, cluster);
  const std::size_t target_tiles = tiles_for(n);
  const double s = static_cast<double>(steps);

  TimeBreakdown worst;
  double worst_total = -1.0;
  for (std::size_t card = 0; card < cluster.ranks(); ++card) {
    TimeBreakdown rank;
    rank.dispatch_s = s * perf.dispatch_s_per_step;
    for (const DevicePlacement &p : placements) {
      if (p.card != card) continue;
      const std::size_t slice_tiles = tiles_for(p.size());
      const double pair_tiles =
          static_cast<double>(slice_tiles) * static_cast<double>(n);
      rank.compute_s = std::max(
          rank.compute_s, s * pair_tiles / perf.tile_pairs_per_second);

      const std::size_t tiles_written = 6 * slice_tiles + 7 * target_tiles;
      const std::size_t tiles_read = 6 * slice_tiles;
      const double bytes =
          static_cast<double>((tiles_written + tiles_read) * Tile::kBytes);
      double dev_transfer =
          bytes / cluster.pcie.bandwidth_bytes_per_s + 3.0 * cluster.pcie.latency_s;
      if (p.on_r_chip) {
        const LinkParams &eth = cluster.cards[card].eth;
        const double tiles = static_cast<double>(tiles_written + tiles_read);
        dev_transfer += tiles * (eth.latency_s +
                                 Tile::kBytes / eth.bandwidth_bytes_per_s);
      }
      rank.transfer_s += s * dev_transfer;

      if (cluster.mode == ScalingMode::MeshSharded) {
        rank.dispatch_s += s * perf.mesh_commands_per_device_per_step *
                           perf.mesh_overhead_s_per_command;
      }
    }
    if (rank.total() > worst_total) {
      worst_total = rank.total();
      worst = rank;
    }
  }
  return worst;
}

}  // namespace gravtile
