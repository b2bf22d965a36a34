#include "gravtile/tile_ops.hpp"

#include <cmath>
#include <stdexcept>

namespace gravtile {

namespace {

void require_arity(bool ok, const char *what) {
  if (!ok) {
    throw std::invalid_argument(std::string("tile_elementwise: ") + what);
  }
}

}  // namespace

Tile tile_elementwise(TileOp op, const Tile &a, const Tile *b, const Tile *c) {
  Tile out;
  switch (op) {
    case TileOp::sub:
      require_arity(b != nullptr && c == nullptr, "sub takes two operands");
      for (std::size_t k = 0; k < Tile::kLanes; ++k) out.lanes[k] = a.lanes[k] - b->lanes[k];
      break;
    case TileOp::add:
      require_arity(b != nullptr && c == nullptr, "add takes two operands");
      for (std::size_t k = 0; k < Tile::kLanes; ++k) out.lanes[k] = a.lanes[k] + b->lanes[k];
      break;
    case TileOp::mul:
      require_arity(b != nullptr && c == nullptr, "mul takes two operands");
      for (std::size_t k = 0; k < Tile::kLanes; ++k) out.lanes[k] = a.lanes[k] * b->lanes[k];
      break;
    case TileOp::square:
      require_arity(b == nullptr && c == nullptr, "square takes one operand");
      for (std::size_t k = 0; k < Tile::kLanes; ++k) out.lanes[k] = a.lanes[k] * a.lanes[k];
      break;
    case TileOp::rsqrt:
      require_arity(b == nullptr && c == nullptr, "rsqrt takes one operand");
      for (std::size_t k = 0; k < Tile::kLanes; ++k) {
        const float x = a.lanes[k];
        if (x < 0.0f) {
          throw std::domain_error("tile_elementwise: rsqrt of negative lane");
        }
        out.lanes[k] = static_cast<float>(1.0 / std::sqrt(static_cast<double>(x)));
      }
      break;
    case TileOp::mul_add:
      require_arity(b != nullptr && c != nullptr, "mul_add takes three operands");
      for (std::size_t k = 0; k < Tile::kLanes; ++k) {
        const float p = a.lanes[k] * b->lanes[k];
        out.lanes[k] = p + c->lanes[k];
      }
      break;
  }
  return out;
}

bool tile_all_finite(const Tile &t) {
  for (float v : t.lanes) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace gravtile
