#pragma once

#include "gravtile/tile.hpp"

namespace gravtile {

/// Elementwise tile operations in simulated device precision. Every result
/// lane is produced by 32-bit round-to-nearest arithmetic, one rounding per
/// elementary operation:
///   sub, add, mul     a (op) b
///   square            a * a
///   rsqrt             32-bit rounding of 1/sqrt(a), via a 64-bit intermediate
///   mul_add           fl32(fl32(a*b) + c), two roundings, never fused
enum class TileOp { sub, add, mul, square, rsqrt, mul_add };

/// Applies `op` lane-wise. b/c must match the op arity (nullptr otherwise):
/// square and rsqrt are unary, mul_add is ternary, the rest binary.
/// Throws std::invalid_argument on arity mismatch and std::domain_error when
/// rsqrt sees a negative lane.
Tile tile_elementwise(TileOp op, const Tile &a, const Tile *b = nullptr, const Tile *c = nullptr);

inline Tile tile_sub(const Tile &a, const Tile &b) { return tile_elementwise(TileOp::sub, a, &b); }
inline Tile tile_add(const Tile &a, const Tile &b) { return tile_elementwise(TileOp::add, a, &b); }
inline Tile tile_mul(const Tile &a, const Tile &b) { return tile_elementwise(TileOp::mul, a, &b); }
inline Tile tile_square(const Tile &a) { return tile_elementwise(TileOp::square, a); }
inline Tile tile_rsqrt(const Tile &a) { return tile_elementwise(TileOp::rsqrt, a); }
inline Tile tile_mul_add(const Tile &a, const Tile &b, const Tile &c) {
  return tile_elementwise(TileOp::mul_add, a, &b, &c);
}

/// True if every lane is finite.
bool tile_all_finite(const Tile &t);

}  // namespace gravtile
