#pragma once

#include <cstddef>
#include <vector>

#include "gravtile/circular_buffer.hpp"
#include "gravtile/dst_register.hpp"
#include "gravtile/tile.hpp"
#include "gravtile/workload.hpp"

namespace gravtile {

/// Buffer depths, in tiles. The transfer unit between read and compute is a
/// whole attribute group (6 source tiles or 7 target tiles), so each
/// inter-kernel buffer holds two groups: one in flight, one being refilled
/// (double buffering at group granularity). The two staging buffers live
/// inside the compute kernel and hold exactly one group each.
inline constexpr std::size_t kSrcBufferTiles = 12;  // 2 groups of 6
inline constexpr std::size_t kTgtBufferTiles = 14;  // 2 groups of 7
inline constexpr std::size_t kOutBufferTiles = 12;  // 2 groups of 6
inline constexpr std::size_t kRijBufferTiles = 3;   // r_x, r_y, r_z
inline constexpr std::size_t kTqBufferTiles = 2;    // t_j, q_ij

/// State owned by one compute worker: the 8-slot dst register file, the two
/// intermediate staging buffers for displacement components and scaling
/// coefficients, and broadcast constants.
struct ComputeContext {
  explicit ComputeContext(float softening_sq);

  DstRegisterFile dst;
  CircularBuffer cb_rij{kRijBufferTiles};
  CircularBuffer cb_tq{kTqBufferTiles};
  Tile softening;  // every lane = softening_sq
  Tile neg_three;  // every lane = -3.0f
};

/// Fold one replicated target particle into the per-lane accumulators.
///
/// Works through four acquire/release windows on the dst register file,
/// staging the displacement components and the (t_j, q_ij) coefficients in
/// the context's circular buffers between windows:
///   window 1: r_ij = r_j - r_i                      -> cb_rij
///   window 2: r² = r_ij·r_ij + ε² (mul_add chain seeded with the softening
///             tile), r⁻¹ = rsqrt(r²), r⁻³ = square(r⁻¹)·r⁻¹,
///             t_j = p_w·r⁻³, A = square(r⁻¹)·(−3), v_ij = v_j − v_i,
///             v_r = r_ij·v_ij (mul then two mul_adds), q = A·v_r -> cb_tq
///   window 3: acc += t_j · r_ij        (one mul_add per axis)
///   window 4: jerk += t_j · (v_ij + q·r_ij), inner term via mul_add(q, r, v)
/// Every elementary operation rounds once in 32-bit; mul_add is the unfused
/// two-rounding form. Window 2 peaks at all 8 dst slots resident.
///
/// Throws std::runtime_error if t_j or q_ij comes out non-finite (softening
/// misconfiguration).
void compute_pair_tile(ComputeContext &ctx, const SourceTileGroup &src,
                       const TargetTiles &tgt, AccumTiles &accum);

/// Convenience overload for direct unit testing: owns a transient context.
void compute_pair_tile(const SourceTileGroup &src, const TargetTiles &tgt,
                       AccumTiles &accum, float softening_sq);

/// Producer stage: for each source tile in the core range, push its 6
/// attribute tiles to cb_src, then stream the full replicated target
/// sequence (7 tiles per target particle) to cb_tgt.
void read_kernel(const TiledWorkload &workload, TileRange core_range,
                 CircularBuffer &cb_src, CircularBuffer &cb_tgt);

/// Compute stage: per source tile, zero accumulators, fold all n_targets
/// replicated targets in ascending index order, push the 6 accumulator
/// tiles to cb_out. The fold order is fixed, which makes results identical
/// across any partitioning of source tiles over cores.
void compute_kernel(CircularBuffer &cb_src, CircularBuffer &cb_tgt,
                    CircularBuffer &cb_out, std::size_t num_source_tiles,
                    std::size_t n_targets, float softening_sq);

/// Consumer stage: pops accumulator groups and stores them at the tile
/// index order they were produced in. `out` must already be sized to the
/// core range; group g lands in out[first_group + g].
void write_kernel(CircularBuffer &cb_out, std::size_t num_source_tiles,
                  std::vector<AccumTiles> &out, std::size_t first_group);

/// Run the full three-stage pipeline for one core: read and write run as
/// dedicated threads, compute executes on the calling thread. Outputs for
/// core_range land at out[range.begin - out_base .. ).
void run_core_pipeline(const TiledWorkload &workload, TileRange core_range,
                       std::vector<AccumTiles> &out, std::size_t out_base);

}  // namespace gravtile
