#pragma once

#include <cstddef>
#include <vector>

#include "gravtile/particle_system.hpp"
#include "gravtile/tile.hpp"

namespace gravtile {

/// Lanes past the real particle count in the last tile group use these
/// fillers: zero mass makes padding inert as a target, and the far position
/// keeps the padding lanes' own (discarded) outputs finite.
inline constexpr double kPadPosition = 1.0e6;
inline constexpr double kPadVelocity = 0.0;
inline constexpr double kPadMass = 0.0;

inline constexpr double kSoftening = 1.0e-7;

/// Contiguous range [begin, end) of source-tile indices handled by one core.
struct TileRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  bool empty() const { return begin == end; }
};

/// One source tile group: 1024 distinct particles' positions and
/// velocities, lane k holding particle (tile_index*1024 + k) of the slice.
struct SourceTileGroup {
  Tile x, y, z, vx, vy, vz;
};

/// One column group of the target data: positions, velocities and weight
/// (mass) for 1024 distinct particles. The read kernel broadcasts single
/// lanes of these columns into replicated per-particle tiles on demand, so
/// the full replicated stream never has to be materialized.
struct TargetColumnGroup {
  Tile x, y, z, vx, vy, vz, w;
};

/// Replicated tiles for a single target particle: every lane carries the
/// same scalar, one tile per attribute.
struct TargetTiles {
  Tile x, y, z, vx, vy, vz, w;
};

/// Per-source-tile accumulator / output group: acceleration then jerk.
struct AccumTiles {
  Tile ax, ay, az, jx, jy, jz;
};

/// Device-ready view of a particle slice: column source tiles for the
/// owned particles plus the full system's target columns.
struct TiledWorkload {
  std::size_t n_slice = 0;    // particles owned by this slice
  std::size_t n_targets = 0;  // full system size; targets stream j = 0..n_targets-1
  float softening_sq = 0.0f;
  std::vector<SourceTileGroup> source_tiles;      // ceil(n_slice/1024) groups
  std::vector<TargetColumnGroup> target_columns;  // ceil(n_targets/1024) groups
  TileRange core_range;  // defaults to all source tiles; narrowed per core

  std::size_t num_source_tiles() const { return source_tiles.size(); }
};

/// Tilize a contiguous slice [begin, end) of the system as source tiles;
/// the target columns always cover the whole system.
TiledWorkload tilize_slice(const ParticleSystem &system, std::size_t begin,
                           std::size_t end);

/// Whole system as both source and target.
TiledWorkload tilize(const ParticleSystem &system);

/// Broadcast target particle j's attributes into replicated tiles.
TargetTiles make_target_tiles(const TiledWorkload &workload, std::size_t j);

/// Read back lane values of per-attribute column tiles as doubles; inverse
/// of the packing direction of tilize (values pass through 32-bit rounding).
std::vector<double> column_values(const std::vector<Tile> &tiles,
                                  std::size_t n);

/// Convert accumulated output tiles back to per-particle acceleration and
/// jerk vectors for the n_slice real particles.
void untilize_forces(const std::vector<AccumTiles> &out_tiles,
                     std::size_t n_slice, std::vector<Vec3> &acc,
                     std::vector<Vec3> &jerk);

}  // namespace gravtile
