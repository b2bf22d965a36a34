#include "gravtile/pipeline.hpp"

#include <exception>
#include <stdexcept>
#include <string>
#include <thread>

#include "gravtile/tile_ops.hpp"

namespace gravtile {

ComputeContext::ComputeContext(float softening_sq) {
  if (!(softening_sq > 0.0f)) {
    throw std::invalid_argument("compute context: softening_sq must be > 0");
  }
  softening.lanes.fill(softening_sq);
  neg_three.lanes.fill(-3.0f);
}

void compute_pair_tile(ComputeContext &ctx, const SourceTileGroup &src,
                       const TargetTiles &tgt, AccumTiles &accum) {
  DstRegisterFile &dst = ctx.dst;

  // Window 1: displacement components, staged for reuse by the three
  // following windows.
  dst.acquire();
  dst.stage(0, tile_sub(tgt.x, src.x));
  dst.stage(1, tile_sub(tgt.y, src.y));
  dst.stage(2, tile_sub(tgt.z, src.z));
  dst.release();
  ctx.cb_rij.reserve_back(3);
  ctx.cb_rij.push_back(dst.get(0));
  ctx.cb_rij.push_back(dst.get(1));
  ctx.cb_rij.push_back(dst.get(2));
  ctx.cb_rij.wait_front(3);
  const Tile rx = ctx.cb_rij.front(0);
  const Tile ry = ctx.cb_rij.front(1);
  const Tile rz = ctx.cb_rij.front(2);

  // Window 2: distance metrics and scaling coefficients. The softened
  // square distance seeds the mul_add chain, so r² = ((ε² + rx²) + ry²) + rz²
  // with one rounding per operation. All 8 dst slots are resident once A_ij
  // lands in slot 7; the velocity-difference and dot-product stages then
  // recycle dead slots.
  dst.acquire();
  dst.stage(0, tile_mul_add(rx, rx, ctx.softening));
  dst.stage(1, tile_mul_add(ry, ry, dst.get(0)));
  dst.stage(2, tile_mul_add(rz, rz, dst.get(1)));          // r²
  dst.stage(3, tile_rsqrt(dst.get(2)));                    // r⁻¹
  dst.stage(4, tile_square(dst.get(3)));                   // r⁻²
  dst.stage(5, tile_mul(dst.get(4), dst.get(3)));          // r⁻³
  dst.stage(6, tile_mul(tgt.w, dst.get(5)));               // t_j = p_w·r⁻³
  dst.stage(7, tile_mul(dst.get(4), ctx.neg_three));       // A_ij = −3·r⁻²
  dst.stage(0, tile_sub(tgt.vx, src.vx));                  // v_ij
  dst.stage(1, tile_sub(tgt.vy, src.vy));
  dst.stage(2, tile_sub(tgt.vz, src.vz));
  dst.stage(3, tile_mul(rx, dst.get(0)));
  dst.stage(4, tile_mul_add(ry, dst.get(1), dst.get(3)));
  dst.stage(5, tile_mul_add(rz, dst.get(2), dst.get(4)));  // v_r = r_ij·v_ij
  dst.stage(3, tile_mul(dst.get(7), dst.get(5)));          // q_ij = A_ij·v_r
  dst.release();
  if (!tile_all_finite(dst.get(6)) || !tile_all_finite(dst.get(3))) {
    throw std::runtime_error(
        "compute_pair_tile: non-finite scaling coefficient (check softening)");
  }
  ctx.cb_tq.reserve_back(2);
  ctx.cb_tq.push_back(dst.get(6));  // t_j
  ctx.cb_tq.push_back(dst.get(3));  // q_ij
  ctx.cb_tq.wait_front(2);
  const Tile t_j = ctx.cb_tq.front(0);
  const Tile q_ij = ctx.cb_tq.front(1);

  // Window 3: acceleration update, one mul_add per axis.
  dst.acquire();
  dst.stage(0, tile_mul_add(t_j, rx, accum.ax));
  dst.stage(1, tile_mul_add(t_j, ry, accum.ay));
  dst.stage(2, tile_mul_add(t_j, rz, accum.az));
  dst.release();
  accum.ax = dst.get(0);
  accum.ay = dst.get(1);
  accum.az = dst.get(2);

  // Window 4: jerk update, t_j·(v_ij + q_ij·r_ij) per axis. The recomputed
  // v_ij slots die as soon as the inner term is formed; the z-axis result
  // recycles slot 0 to stay within the 8-slot file.
  dst.acquire();
  dst.stage(0, tile_sub(tgt.vx, src.vx));
  dst.stage(1, tile_mul_add(q_ij, rx, dst.get(0)));
  dst.stage(2, tile_mul_add(t_j, dst.get(1), accum.jx));
  dst.stage(3, tile_sub(tgt.vy, src.vy));
  dst.stage(4, tile_mul_add(q_ij, ry, dst.get(3)));
  dst.stage(5, tile_mul_add(t_j, dst.get(4), accum.jy));
  dst.stage(6, tile_sub(tgt.vz, src.vz));
  dst.stage(7, tile_mul_add(q_ij, rz, dst.get(6)));
  dst.stage(0, tile_mul_add(t_j, dst.get(7), accum.jz));
  dst.release();
  accum.jx = dst.get(2);
  accum.jy = dst.get(5);
  accum.jz = dst.get(0);

  ctx.cb_tq.pop_front(2);
  ctx.cb_rij.pop_front(3);
}

void compute_pair_tile(const SourceTileGroup &src, const TargetTiles &tgt,
                       AccumTiles &accum, float softening_sq) {
  ComputeContext ctx(softening_sq);
  compute_pair_tile(ctx, src, tgt, accum);
}

void read_kernel(const TiledWorkload &workload, TileRange core_range,
                 CircularBuffer &cb_src, CircularBuffer &cb_tgt) {
  if (core_range.end > workload.num_source_tiles()) {
    throw std::out_of_range("read_kernel: core range beyond source tiles");
  }
  for (std::size_t t = core_range.begin; t < core_range.end; ++t) {
    const SourceTileGroup &g = workload.source_tiles[t];
    cb_src.reserve_back(6);
    cb_src.push_back(g.x);
    cb_src.push_back(g.y);
    cb_src.push_back(g.z);
    cb_src.push_back(g.vx);
    cb_src.push_back(g.vy);
    cb_src.push_back(g.vz);
    for (std::size_t j = 0; j < workload.n_targets; ++j) {
      const TargetTiles tt = make_target_tiles(workload, j);
      cb_tgt.reserve_back(7);
      cb_tgt.push_back(tt.x);
      cb_tgt.push_back(tt.y);
      cb_tgt.push_back(tt.z);
      cb_tgt.push_back(tt.vx);
      cb_tgt.push_back(tt.vy);
      cb_tgt.push_back(tt.vz);
      cb_tgt.push_back(tt.w);
    }
  }
}

void compute_kernel(CircularBuffer &cb_src, CircularBuffer &cb_tgt,
                    CircularBuffer &cb_out, std::size_t num_source_tiles,
                    std::size_t n_targets, float softening_sq) {
  ComputeContext ctx(softening_sq);
  for (std::size_t t = 0; t < num_source_tiles; ++t) {
    cb_src.wait_front(6);
    SourceTileGroup src;
    src.x = cb_src.front(0);
    src.y = cb_src.front(1);
    src.z = cb_src.front(2);
    src.vx = cb_src.front(3);
    src.vy = cb_src.front(4);
    src.vz = cb_src.front(5);
    cb_src.pop_front(6);

    AccumTiles accum;  // default tiles are all-zero
    for (std::size_t j = 0; j < n_targets; ++j) {
      cb_tgt.wait_front(7);
      TargetTiles tgt;
      tgt.x = cb_tgt.front(0);
      tgt.y = cb_tgt.front(1);
      tgt.z = cb_tgt.front(2);
      tgt.vx = cb_tgt.front(3);
      tgt.vy = cb_tgt.front(4);
      tgt.vz = cb_tgt.front(5);
      tgt.w = cb_tgt.front(6);
      cb_tgt.pop_front(7);
      compute_pair_tile(ctx, src, tgt, accum);
    }

    cb_out.reserve_back(6);
    cb_out.push_back(accum.ax);
    cb_out.push_back(accum.ay);
    cb_out.push_back(accum.az);
    cb_out.push_back(accum.jx);
    cb_out.push_back(accum.jy);
    cb_out.push_back(accum.jz);
  }
}

void write_kernel(CircularBuffer &cb_out, std::size_t num_source_tiles,
                  std::vector<AccumTiles> &out, std::size_t first_group) {
  if (first_group + num_source_tiles > out.size()) {
    throw std::runtime_error(
        "write_kernel: result buffer holds " + std::to_string(out.size()) +
        " groups, need " + std::to_string(first_group + num_source_tiles));
  }
  for (std::size_t g = 0; g < num_source_tiles; ++g) {
    cb_out.wait_front(6);
    AccumTiles &slot = out[first_group + g];
    slot.ax = cb_out.front(0);
    slot.ay = cb_out.front(1);
    slot.az = cb_out.front(2);
    slot.jx = cb_out.front(3);
    slot.jy = cb_out.front(4);
    slot.jz = cb_out.front(5);
    cb_out.pop_front(6);
  }
}

void run_core_pipeline(const TiledWorkload &workload, TileRange core_range,
                       std::vector<AccumTiles> &out, std::size_t out_base) {
  if (core_range.empty()) return;

  CircularBuffer cb_src(kSrcBufferTiles);
  CircularBuffer cb_tgt(kTgtBufferTiles);
  CircularBuffer cb_out(kOutBufferTiles);

  auto poison_all = [&](std::exception_ptr err) {
    cb_src.poison(err);
    cb_tgt.poison(err);
    cb_out.poison(err);
  };

  std::exception_ptr read_err, compute_err, write_err;
  std::thread reader([&] {
    try {
      read_kernel(workload, core_range, cb_src, cb_tgt);
    } catch (...) {
      read_err = std::current_exception();
      poison_all(read_err);
    }
  });
  std::thread writer([&] {
    try {
      write_kernel(cb_out, core_range.size(), out, core_range.begin - out_base);
    } catch (...) {
      write_err = std::current_exception();
      poison_all(write_err);
    }
  });
  try {
    compute_kernel(cb_src, cb_tgt, cb_out, core_range.size(),
                   workload.n_targets, workload.softening_sq);
  } catch (...) {
    compute_err = std::current_exception();
    poison_all(compute_err);
  }
  reader.join();
  writer.join();

  for (const auto &err : {compute_err, write_err, read_err}) {
    if (err) std::rethrow_exception(err);
  }
}

}  // namespace gravtile
