// Tile arithmetic semantics, the destination register file protocol, and
// the circular-buffer transfer protocol.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "gravtile/circular_buffer.hpp"
#include "gravtile/dst_register.hpp"
#include "gravtile/tile.hpp"
#include "gravtile/tile_ops.hpp"

using namespace gravtile;

namespace {

Tile random_tile(std::mt19937_64 &rng, float lo, float hi) {
  Tile t;
  for (auto &v : t.lanes) {
    const double u = (rng() >> 11) * 0x1.0p-53;
    v = static_cast<float>(lo + (hi - lo) * u);
  }
  return t;
}

Tile sequence_tile(std::uint32_t id) {
  Tile t;
  t[0] = static_cast<float>(id);
  for (std::size_t k = 1; k < Tile::kLanes; ++k) {
    t[k] = static_cast<float>(id * 31u + k);
  }
  return t;
}

// Scalar model of each op: one 32-bit rounding per elementary operation,
// the reciprocal square root through a 64-bit intermediate, multiply-add
// as two separately rounded operations.
float scalar_op(TileOp op, float a, float b = 0.0f, float c = 0.0f) {
  switch (op) {
    case TileOp::sub:
      return a - b;
    case TileOp::add:
      return a + b;
    case TileOp::mul:
      return a * b;
    case TileOp::square:
      return a * a;
    case TileOp::rsqrt:
      return static_cast<float>(1.0 / std::sqrt(static_cast<double>(a)));
    case TileOp::mul_add: {
      const float p = a * b;
      return p + c;
    }
  }
  return 0.0f;
}

}  // namespace

TEST_CASE("tile op closed forms") {
  const Tile four = broadcast_scalar(4.0);
  const Tile half = tile_rsqrt(four);
  for (float v : half.lanes) CHECK(v == 0.5f);

  Tile t = sequence_tile(3);
  const Tile zero = tile_sub(t, t);
  for (float v : zero.lanes) CHECK(v == 0.0f);

  const Tile seven =
      tile_mul_add(broadcast_scalar(2.0), broadcast_scalar(3.0), broadcast_scalar(1.0));
  for (float v : seven.lanes) CHECK(v == 7.0f);
}

TEST_CASE("every op matches the scalar single-rounding model bit-for-bit") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 8; ++trial) {
    const Tile a = random_tile(rng, -100.0f, 100.0f);
    const Tile b = random_tile(rng, -100.0f, 100.0f);
    const Tile c = random_tile(rng, -100.0f, 100.0f);
    const Tile pos = random_tile(rng, 1e-6f, 100.0f);

    struct Case {
      TileOp op;
      Tile result;
    };
    const Case cases[] = {
        {TileOp::sub, tile_sub(a, b)},      {TileOp::add, tile_add(a, b)},
        {TileOp::mul, tile_mul(a, b)},      {TileOp::square, tile_square(a)},
        {TileOp::rsqrt, tile_rsqrt(pos)},   {TileOp::mul_add, tile_mul_add(a, b, c)},
    };
    for (const auto &cs : cases) {
      for (std::size_t k = 0; k < Tile::kLanes; ++k) {
        const float in = (cs.op == TileOp::rsqrt) ? pos[k] : a[k];
        const float expect = scalar_op(cs.op, in, b[k], c[k]);
        CHECK(std::memcmp(&cs.result.lanes[k], &expect, sizeof(float)) == 0);
      }
    }
  }
}

TEST_CASE("mul_add keeps two roundings: it is not a fused multiply-add") {
  // a = b = 1 + 2^-12, c = -(1 + 2^-11): the exact product is
  // 1 + 2^-11 + 2^-24; a single-rounded product drops the 2^-24.
  const float a = 1.0f + 0x1.0p-12f;
  const float c = -(1.0f + 0x1.0p-11f);
  const Tile r = tile_mul_add(broadcast_scalar(a), broadcast_scalar(a), broadcast_scalar(c));
  const float fused = std::fma(a, a, c);
  CHECK(r[0] == 0.0f);
  CHECK(fused == 0x1.0p-24f);
  CHECK(r[0] != fused);

  // and over random inputs the two models disagree somewhere
  std::mt19937_64 rng(99);
  int diffs = 0;
  for (int trial = 0; trial < 4; ++trial) {
    const Tile ta = random_tile(rng, -10.0f, 10.0f);
    const Tile tb = random_tile(rng, -10.0f, 10.0f);
    const Tile tc = random_tile(rng, -10.0f, 10.0f);
    const Tile out = tile_mul_add(ta, tb, tc);
    for (std::size_t k = 0; k < Tile::kLanes; ++k) {
      if (out[k] != std::fma(ta[k], tb[k], tc[k])) ++diffs;
    }
  }
  CHECK(diffs > 0);
}

TEST_CASE("rsqrt domain and arity violations") {
  Tile neg = broadcast_scalar(1.0);
  neg[17] = -4.0f;
  CHECK_THROWS_AS(tile_rsqrt(neg), std::domain_error);

  const Tile a = broadcast_scalar(1.0);
  CHECK_THROWS_AS(tile_elementwise(TileOp::sub, a), std::invalid_argument);
  CHECK_THROWS_AS(tile_elementwise(TileOp::add, a), std::invalid_argument);
  CHECK_THROWS_AS(tile_elementwise(TileOp::mul_add, a, &a), std::invalid_argument);
  CHECK_THROWS_AS(tile_elementwise(TileOp::square, a, &a), std::invalid_argument);
  CHECK_THROWS_AS(tile_elementwise(TileOp::rsqrt, a, &a, &a), std::invalid_argument);
}

TEST_CASE("rsqrt of zero is +inf and tile_all_finite flags it") {
  const Tile z = tile_rsqrt(broadcast_scalar(0.0));
  CHECK(std::isinf(z[0]));
  CHECK(!tile_all_finite(z));
  CHECK(tile_all_finite(broadcast_scalar(1.0)));
}

TEST_CASE("dst register file: legal acquire/stage/release cycle") {
  DstRegisterFile dst;
  CHECK(!dst.acquired());
  CHECK(dst.resident() == 0);

  dst.acquire();
  CHECK(dst.acquired());
  for (std::size_t s = 0; s < DstRegisterFile::kSlots; ++s) {
    dst.stage(s, sequence_tile(static_cast<std::uint32_t>(s)));
  }
  CHECK(dst.resident() == 8);
  dst.release();
  CHECK(!dst.acquired());

  // staged tiles stay readable after release...
  for (std::size_t s = 0; s < DstRegisterFile::kSlots; ++s) {
    CHECK(bits_equal(dst.get(s), sequence_tile(static_cast<std::uint32_t>(s))));
  }
  // ...until the next acquire clears them
  dst.acquire();
  CHECK(dst.resident() == 0);
  CHECK_THROWS_AS(dst.get(0), std::logic_error);
  dst.release();
}

TEST_CASE("dst register file: protocol violations") {
  DstRegisterFile dst;
  CHECK_THROWS_AS(dst.release(), std::logic_error);
  CHECK_THROWS_AS(dst.stage(0, Tile{}), std::logic_error);  // stage w/o acquire

  dst.acquire();
  CHECK_THROWS_AS(dst.acquire(), std::logic_error);  // double acquire
  CHECK_THROWS_AS(dst.stage(DstRegisterFile::kSlots, Tile{}), std::out_of_range);
  CHECK_THROWS_AS(dst.get(DstRegisterFile::kSlots), std::out_of_range);
  CHECK_THROWS_AS(dst.get(3), std::logic_error);  // never staged
  dst.stage(3, sequence_tile(7));
  dst.stage(3, sequence_tile(8));  // overwrite is legal
  CHECK(bits_equal(dst.get(3), sequence_tile(8)));
  CHECK(dst.resident() == 1);
  dst.release();
  CHECK_THROWS_AS(dst.release(), std::logic_error);
}

TEST_CASE("circular buffer: basic reserve/push/wait/front/pop cycle") {
  CircularBuffer cb(4);
  CHECK(cb.capacity() == 4);
  CHECK(cb.size() == 0);

  cb.reserve_back(2);
  cb.push_back(sequence_tile(0));
  cb.push_back(sequence_tile(1));
  CHECK(cb.size() == 2);

  cb.wait_front(2);
  CHECK(bits_equal(cb.front(0), sequence_tile(0)));
  CHECK(bits_equal(cb.front(1), sequence_tile(1)));
  cb.pop_front(1);
  CHECK(bits_equal(cb.front(0), sequence_tile(1)));
  cb.pop_front(1);
  CHECK(cb.size() == 0);
}

TEST_CASE("circular buffer: capacity zero and over-capacity requests") {
  CHECK_THROWS_AS(CircularBuffer(0), std::invalid_argument);
  CircularBuffer cb(2);
  CHECK_THROWS_AS(cb.reserve_back(3), std::logic_error);
  CHECK_THROWS_AS(cb.wait_front(3), std::logic_error);
}

TEST_CASE("circular buffer: credit discipline is enforced") {
  CircularBuffer cb(4);
  CHECK_THROWS_AS(cb.push_back(Tile{}), std::logic_error);  // push w/o reserve
  cb.reserve_back(1);
  cb.push_back(Tile{});
  CHECK_THROWS_AS(cb.push_back(Tile{}), std::logic_error);  // credit spent
  CHECK_THROWS_AS(cb.front(), std::logic_error);            // front w/o wait
  CHECK_THROWS_AS(cb.pop_front(1), std::logic_error);       // pop w/o wait
  cb.wait_front(1);
  CHECK_THROWS_AS(cb.pop_front(2), std::logic_error);  // pop beyond window
  CHECK_THROWS_AS(cb.front(1), std::logic_error);      // index beyond window
  cb.pop_front(1);
}

TEST_CASE("circular buffer: producer backpressure un-blocks after pop") {
  CircularBuffer cb(2);
  cb.reserve_back(2);
  cb.push_back(sequence_tile(0));
  cb.push_back(sequence_tile(1));  // buffer now full

  std::atomic<bool> produced{false};
  std::thread producer([&] {
    cb.reserve_back(1);  // must block until the consumer pops
    cb.push_back(sequence_tile(2));
    produced = true;
  });

  std::this_thread::sleep_for(std::chrono::milliseconds(50));
  CHECK(!produced.load());

  cb.wait_front(1);
  cb.pop_front(1);
  producer.join();
  CHECK(produced.load());

  cb.wait_front(2);
  CHECK(bits_equal(cb.front(0), sequence_tile(1)));
  CHECK(bits_equal(cb.front(1), sequence_tile(2)));
  cb.pop_front(2);
}

TEST_CASE("circular buffer: threaded FIFO transfer preserves order exactly") {
  const std::uint32_t kTiles = 3000;
  for (std::size_t cap : {1u, 3u, 7u}) {
    CircularBuffer cb(cap);
    std::thread producer([&] {
      for (std::uint32_t i = 0; i < kTiles; ++i) {
        cb.reserve_back(1);
        cb.push_back(sequence_tile(i));
      }
    });
    std::uint32_t mismatches = 0;
    for (std::uint32_t i = 0; i < kTiles; ++i) {
      cb.wait_front(1);
      if (!bits_equal(cb.front(), sequence_tile(i))) ++mismatches;
      cb.pop_front(1);
    }
    producer.join();
    CHECK(mismatches == 0);
    CHECK(cb.size() == 0);
  }
}

TEST_CASE("circular buffer: randomized batch sizes keep FIFO order") {
  // Progress is guaranteed whenever producer batch + consumer batch fits the
  // capacity, so each side draws from [1, cap/2].
  const std::size_t cap = 4;
  const std::size_t max_batch = cap / 2;
  const std::uint32_t kTiles = 2000;
  CircularBuffer cb(cap);
  std::thread producer([&] {
    std::mt19937_64 rng(555);
    std::uint32_t sent = 0;
    while (sent < kTiles) {
      const std::size_t batch =
          std::min<std::size_t>(1 + rng() % max_batch, kTiles - sent);
      cb.reserve_back(batch);
      for (std::size_t k = 0; k < batch; ++k) cb.push_back(sequence_tile(sent++));
    }
  });
  std::mt19937_64 rng(777);
  std::uint32_t got = 0, mismatches = 0;
  while (got < kTiles) {
    const std::size_t batch =
        std::min<std::size_t>(1 + rng() % max_batch, kTiles - got);
    cb.wait_front(batch);
    for (std::size_t k = 0; k < batch; ++k) {
      if (!bits_equal(cb.front(k), sequence_tile(got + static_cast<std::uint32_t>(k)))) {
        ++mismatches;
      }
    }
    got += static_cast<std::uint32_t>(batch);
    cb.pop_front(batch);
  }
  producer.join();
  CHECK(mismatches == 0);
}

TEST_CASE("circular buffer: poison wakes a blocked consumer") {
  CircularBuffer cb(2);
  std::atomic<bool> threw{false};
  std::thread consumer([&] {
    try {
      cb.wait_front(1);  // nothing will ever arrive
    } catch (const std::runtime_error &e) {
      threw = std::string(e.what()).find("boom") != std::string::npos;
    }
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  cb.poison(std::make_exception_ptr(std::runtime_error("boom")));
  consumer.join();
  CHECK(threw.load());
  // every subsequent call rethrows as well
  CHECK_THROWS_AS(cb.reserve_back(1), std::runtime_error);
  CHECK_THROWS_AS(cb.wait_front(1), std::runtime_error);
}

TEST_CASE("circular buffer: poison wakes a blocked producer") {
  CircularBuffer cb(1);
  cb.reserve_back(1);
  cb.push_back(Tile{});  // full
  std::atomic<bool> threw{false};
  std::thread producer([&] {
    try {
      cb.reserve_back(1);
    } catch (const std::runtime_error &) {
      threw = true;
    }
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  cb.poison(std::make_exception_ptr(std::runtime_error("down")));
  producer.join();
  CHECK(threw.load());
}
