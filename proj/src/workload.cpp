#include "gravtile/workload.hpp"

#include <stdexcept>
#include <string>

namespace gravtile {

namespace {

// Pack component `axis` of `field[begin+k]` into lane k, padding the tail.
Tile pack_axis(const std::vector<Vec3> &field, std::size_t begin,
               std::size_t end, int axis, double pad) {
  Tile t;
  for (std::size_t k = 0; k < Tile::kLanes; ++k) {
    const std::size_t idx = begin + k;
    const double v = idx < end ? field[idx][axis] : pad;
    t.lanes[k] = static_cast<float>(v);
  }
  return t;
}

// Weight lanes carry G·m so the compute kernel's t_j = p_w·r⁻³ realizes the
// full force coefficient; the product is taken in 64-bit and rounded once.
Tile pack_weight(const std::vector<double> &mass, double grav_const,
                 std::size_t begin, std::size_t end) {
  Tile t;
  for (std::size_t k = 0; k < Tile::kLanes; ++k) {
    const std::size_t idx = begin + k;
    t.lanes[k] =
        static_cast<float>(idx < end ? grav_const * mass[idx] : kPadMass);
  }
  return t;
}

}  // namespace

TiledWorkload tilize_slice(const ParticleSystem &system, std::size_t begin,
                           std::size_t end) {
  if (begin > end || end > system.size()) {
    throw std::invalid_argument("tilize_slice: slice [" +
                                std::to_string(begin) + ", " +
                                std::to_string(end) + ") out of range");
  }
  TiledWorkload w;
  w.n_slice = end - begin;
  w.n_targets = system.size();
  w.softening_sq = static_cast<float>(kSoftening * kSoftening);

  const std::size_t src_tiles = (w.n_slice + Tile::kLanes - 1) / Tile::kLanes;
  w.source_tiles.reserve(src_tiles);
  for (std::size_t t = 0; t < src_tiles; ++t) {
    const std::size_t base = begin + t * Tile::kLanes;
    SourceTileGroup g;
    g.x = pack_axis(system.pos, base, end, 0, kPadPosition);
    g.y = pack_axis(system.pos, base, end, 1, kPadPosition);
    g.z = pack_axis(system.pos, base, end, 2, kPadPosition);
    g.vx = pack_axis(system.vel, base, end, 0, kPadVelocity);
    g.vy = pack_axis(system.vel, base, end, 1, kPadVelocity);
    g.vz = pack_axis(system.vel, base, end, 2, kPadVelocity);
    w.source_tiles.push_back(g);
  }

  const std::size_t n = system.size();
  const std::size_t tgt_tiles = (n + Tile::kLanes - 1) / Tile::kLanes;
  w.target_columns.reserve(tgt_tiles);
  for (std::size_t t = 0; t < tgt_tiles; ++t) {
    const std::size_t base = t * Tile::kLanes;
    TargetColumnGroup g;
    g.x = pack_axis(system.pos, base, n, 0, kPadPosition);
    g.y = pack_axis(system.pos, base, n, 1, kPadPosition);
    g.z = pack_axis(system.pos, base, n, 2, kPadPosition);
    g.vx = pack_axis(system.vel, base, n, 0, kPadVelocity);
    g.vy = pack_axis(system.vel, base, n, 1, kPadVelocity);
    g.vz = pack_axis(system.vel, base, n, 2, kPadVelocity);
    g.w = pack_weight(system.mass, system.grav_const, base, n);
    w.target_columns.push_back(g);
  }

  w.core_range = TileRange{0, src_tiles};
  return w;
}

TiledWorkload tilize(const ParticleSystem &system) {
  return tilize_slice(system, 0, system.size());
}

TargetTiles make_target_tiles(const TiledWorkload &workload, std::size_t j) {
  if (j >= workload.n_targets) {
    throw std::out_of_range("make_target_tiles: target index " +
                            std::to_string(j) + " >= " +
                            std::to_string(workload.n_targets));
  }
  const TargetColumnGroup &col = workload.target_columns[j / Tile::kLanes];
  const std::size_t lane = j % Tile::kLanes;
  TargetTiles t;
  t.x.lanes.fill(col.x.lanes[lane]);
  t.y.lanes.fill(col.y.lanes[lane]);
  t.z.lanes.fill(col.z.lanes[lane]);
  t.vx.lanes.fill(col.vx.lanes[lane]);
  t.vy.lanes.fill(col.vy.lanes[lane]);
  t.vz.lanes.fill(col.vz.lanes[lane]);
  t.w.lanes.fill(col.w.lanes[lane]);
  return t;
}

std::vector<double> column_values(const std::vector<Tile> &tiles,
                                  std::size_t n) {
  if (tiles.size() * Tile::kLanes < n) {
    throw std::invalid_argument("column_values: not enough tiles for " +
                                std::to_string(n) + " values");
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = static_cast<double>(tiles[i / Tile::kLanes].lanes[i % Tile::kLanes]);
  }
  return out;
}

void untilize_forces(const std::vector<AccumTiles> &out_tiles,
                     std::size_t n_slice, std::vector<Vec3> &acc,
                     std::vector<Vec3> &jerk) {
  if (out_tiles.size() * Tile::kLanes < n_slice) {
    throw std::invalid_argument("untilize_forces: output tiles cover " +
                                std::to_string(out_tiles.size() * Tile::kLanes) +
                                " lanes, need " + std::to_string(n_slice));
  }
  acc.assign(n_slice, Vec3{0.0, 0.0, 0.0});
  jerk.assign(n_slice, Vec3{0.0, 0.0, 0.0});
  for (std::size_t i = 0; i < n_slice; ++i) {
    const AccumTiles &g = out_tiles[i / Tile::kLanes];
    const std::size_t lane = i % Tile::kLanes;
    acc[i] = Vec3{static_cast<double>(g.ax.lanes[lane]),
                  static_cast<double>(g.ay.lanes[lane]),
                  static_cast<double>(g.az.lanes[lane])};
    jerk[i] = Vec3{static_cast<double>(g.jx.lanes[lane]),
                   static_cast<double>(g.jy.lanes[lane]),
                   static_cast<double>(g.jz.lanes[lane])};
  }
}

}  // namespace gravtile
