#pragma once

#include <array>
#include <cstddef>
#include <cstring>
#include <span>

namespace gravtile {

/// A 32x32 grid of single-precision values, the unit of accelerator
/// computation. Lanes are indexed row-major: lane = row * 32 + col.
struct Tile {
  static constexpr std::size_t kDim = 32;
  static constexpr std::size_t kLanes = kDim * kDim;  // 1024
  static constexpr std::size_t kBytes = kLanes * sizeof(float);

  std::array<float, kLanes> lanes{};

  float &operator[](std::size_t lane) { return lanes[lane]; }
  float operator[](std::size_t lane) const { return lanes[lane]; }

  float at(std::size_t row, std::size_t col) const { return lanes[row * kDim + col]; }
};

/// Bit-level tile equality (distinguishes -0.0f from +0.0f, NaN == NaN).
inline bool bits_equal(const Tile &a, const Tile &b) {
  return std::memcmp(a.lanes.data(), b.lanes.data(), Tile::kBytes) == 0;
}

/// Fill a tile with 1024 identical copies of one scalar, rounded to 32-bit.
/// Throws std::invalid_argument if x is not finite.
Tile broadcast_scalar(double x);

/// Pack exactly 1024 distinct values into a tile, lane k holding the 32-bit
/// rounding of values[k]. Throws on wrong count or non-finite input.
Tile pack_column_tile(std::span<const double> values);

}  // namespace gravtile
