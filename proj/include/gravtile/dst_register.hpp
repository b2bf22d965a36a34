#pragma once

#include <array>
#include <cstddef>
#include <optional>

#include "gravtile/tile.hpp"

namespace gravtile {

/// The 8-slot destination register file of one compute worker. Staging a
/// result requires holding the acquire lock; release ends the compute burst
/// but staged tiles stay readable (for packing) until the next acquire,
/// which clears all slots.
class DstRegisterFile {
 public:
  static constexpr std::size_t kSlots = 8;

  /// Throws std::logic_error on double acquire (a kernel programming bug).
  void acquire();

  /// Throws std::logic_error if not acquired.
  void release();

  /// Stage a tile into a slot, overwriting any previous content. Requires
  /// the register file to be acquired; slot must be < 8.
  void stage(std::size_t slot, Tile tile);

  /// Read a staged tile; legal while acquired and after release, until the
  /// next acquire. Throws if the slot was never staged.
  const Tile &get(std::size_t slot) const;

  bool acquired() const { return acquired_; }
  std::size_t resident() const;

 private:
  std::array<std::optional<Tile>, kSlots> slots_;
  bool acquired_ = false;
};

}  // namespace gravtile
