#include "gravtile/circular_buffer.hpp"

#include <stdexcept>
#include <string>

namespace gravtile {

CircularBuffer::CircularBuffer(std::size_t capacity_tiles)
    : capacity_(capacity_tiles) {
  if (capacity_ == 0) {
    throw std::invalid_argument("circular buffer: capacity must be positive");
  }
}

void CircularBuffer::throw_if_poisoned() const {
  if (poison_) std::rethrow_exception(poison_);
}

void CircularBuffer::reserve_back(std::size_t k) {
  std::unique_lock<std::mutex> lock(mu_);
  if (k > capacity_) {
    throw std::logic_error(
        "circular buffer: reserve_back(" + std::to_string(k) +
        ") exceeds capacity " + std::to_string(capacity_));
  }
  space_cv_.wait(lock, [&] {
    return poison_ || tiles_.size() + reserved_ + k <= capacity_;
  });
  throw_if_poisoned();
  reserved_ += k;
}

void CircularBuffer::push_back(const Tile &t) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    throw_if_poisoned();
    if (reserved_ == 0) {
      throw std::logic_error("circular buffer: push_back without reservation");
    }
    --reserved_;
    tiles_.push_back(t);
  }
  data_cv_.notify_one();
}

void CircularBuffer::wait_front(std::size_t k) {
  std::unique_lock<std::mutex> lock(mu_);
  if (k > capacity_) {
    throw std::logic_error(
        "circular buffer: wait_front(" + std::to_string(k) +
        ") exceeds capacity " + std::to_string(capacity_));
  }
  data_cv_.wait(lock, [&] { return poison_ || tiles_.size() >= waited_ + k; });
  throw_if_poisoned();
  waited_ += k;
}

Tile CircularBuffer::front(std::size_t i) const {
  std::lock_guard<std::mutex> lock(mu_);
  throw_if_poisoned();
  if (i >= waited_) {
    throw std::logic_error("circular buffer: front(" + std::to_string(i) +
                           ") outside the waited window of " +
                           std::to_string(waited_) + " tiles");
  }
  return tiles_[i];
}

void CircularBuffer::pop_front(std::size_t k) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    throw_if_poisoned();
    if (k > waited_) {
      throw std::logic_error("circular buffer: pop_front(" + std::to_string(k) +
                             ") exceeds waited window of " +
                             std::to_string(waited_) + " tiles");
    }
    for (std::size_t i = 0; i < k; ++i) tiles_.pop_front();
    waited_ -= k;
  }
  space_cv_.notify_one();
}

std::size_t CircularBuffer::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return tiles_.size();
}

void CircularBuffer::poison(std::exception_ptr err) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (!poison_) poison_ = err;
  }
  space_cv_.notify_all();
  data_cv_.notify_all();
}

}  // namespace gravtile
