#include "gravtile/tile.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gravtile {

Tile broadcast_scalar(double x) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument("broadcast_scalar: value is not finite");
  }
  Tile t;
  t.lanes.fill(static_cast<float>(x));
  return t;
}

Tile pack_column_tile(std::span<const double> values) {
  if (values.size() != Tile::kLanes) {
    throw std::invalid_argument("pack_column_tile: expected " + std::to_string(Tile::kLanes) +
                                " values, got " + std::to_string(values.size()));
  }
  Tile t;
  for (std::size_t k = 0; k < Tile::kLanes; ++k) {
    if (!std::isfinite(values[k])) {
      throw std::invalid_argument("pack_column_tile: value at lane " + std::to_string(k) +
                                  " is not finite");
    }
    t.lanes[k] = static_cast<float>(values[k]);
  }
  return t;
}

}  // namespace gravtile
