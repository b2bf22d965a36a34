#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <exception>
#include <mutex>

#include "gravtile/tile.hpp"

namespace gravtile {

/// Bounded FIFO of tiles connecting two pipeline stages, with the
/// reserve/push and wait/pop handshake:
///
///   producer: reserve_back(k)  -- blocks until k free slots, takes credit
///             push_back(tile)  -- consumes one credit  (x k)
///   consumer: wait_front(k)    -- blocks until k tiles visible, takes credit
///             front(i)         -- peek tile i of the waited window
///             pop_front(k)     -- retire k tiles, consumes credit
///
/// Pushing without a reservation, popping more than was waited for, or
/// asking for more than the buffer can ever hold are protocol errors and
/// throw std::logic_error. All methods are thread safe; a buffer is owned
/// by exactly one producer and one consumer thread.
class CircularBuffer {
 public:
  explicit CircularBuffer(std::size_t capacity_tiles);

  std::size_t capacity() const { return capacity_; }

  /// Block until k slots are free beyond existing reservations, then hold
  /// them for this producer. Throws if k exceeds total capacity.
  void reserve_back(std::size_t k);

  /// Append one tile, consuming one reserved slot.
  void push_back(const Tile &t);

  /// Block until at least k tiles are visible past the already-waited
  /// window; extends the waited window by k. Throws if k > capacity.
  void wait_front(std::size_t k);

  /// Peek tile i (0-based) within the waited window.
  Tile front(std::size_t i = 0) const;

  /// Retire the first k tiles of the waited window, freeing their slots.
  void pop_front(std::size_t k);

  /// Tiles currently stored (for tests / diagnostics).
  std::size_t size() const;

  /// Shutdown hook, not part of the transfer protocol: wakes every blocked
  /// peer and makes all further calls rethrow `err`, so a failing kernel
  /// cannot strand the other two stages in a blocking wait.
  void poison(std::exception_ptr err);

 private:
  void throw_if_poisoned() const;  // callers hold mu_

  const std::size_t capacity_;
  mutable std::mutex mu_;
  std::condition_variable space_cv_;  // producer waits for free slots
  std::condition_variable data_cv_;   // consumer waits for tiles
  std::deque<Tile> tiles_;
  std::size_t reserved_ = 0;  // slots promised to producer, not yet pushed
  std::size_t waited_ = 0;    // tiles granted to consumer, not yet popped
  std::exception_ptr poison_;
};

}  // namespace gravtile
