#include "gravtile/dst_register.hpp"

#include <stdexcept>
#include <string>

namespace gravtile {

void DstRegisterFile::acquire() {
  if (acquired_) {
    throw std::logic_error("dst register file: acquire while already acquired");
  }
  for (auto &s : slots_) s.reset();
  acquired_ = true;
}

void DstRegisterFile::release() {
  if (!acquired_) {
    throw std::logic_error("dst register file: release without acquire");
  }
  acquired_ = false;
}

void DstRegisterFile::stage(std::size_t slot, Tile tile) {
  if (!acquired_) {
    throw std::logic_error("dst register file: stage without acquire");
  }
  if (slot >= kSlots) {
    throw std::out_of_range("dst register file: slot " + std::to_string(slot) +
                            " exceeds capacity of " + std::to_string(kSlots) +
                            " tiles");
  }
  slots_[slot] = std::move(tile);
}

const Tile &DstRegisterFile::get(std::size_t slot) const {
  if (slot >= kSlots) {
    throw std::out_of_range("dst register file: slot out of range");
  }
  if (!slots_[slot].has_value()) {
    throw std::logic_error("dst register file: slot " + std::to_string(slot) +
                           " read before being staged");
  }
  return *slots_[slot];
}

std::size_t DstRegisterFile::resident() const {
  std::size_t n = 0;
  for (const auto &s : slots_) {
    if (s.has_value()) ++n;
  }
  return n;
}

}  // namespace gravtile
