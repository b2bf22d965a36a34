#pragma once

#include <filesystem>
#include <string>

#include "gravtile/particle_system.hpp"

namespace gravtile {

/// Plain-text particle snapshot, one particle per line (`mass x y z vx vy vz`,
/// 17 significant digits) under a header `# gravtile v1 n=<N> t=<time> G=<G>`.
/// The 17-digit decimal encoding round-trips 64-bit values bit-exactly.
std::string snapshot_to_string(const ParticleSystem &system);
ParticleSystem snapshot_from_string(const std::string &text);

void write_snapshot(const std::filesystem::path &path, const ParticleSystem &system);
ParticleSystem read_snapshot(const std::filesystem::path &path);

}  // namespace gravtile
