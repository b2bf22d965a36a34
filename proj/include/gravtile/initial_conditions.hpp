#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "gravtile/particle_system.hpp"

namespace gravtile {

/// Deterministic sample for (n, seed, model). Models:
///   "uniform-sphere": positions uniform in the unit ball, isotropic Gaussian
///                     velocities rescaled to virial equilibrium (2K = |W|),
///                     equal masses summing to 1.
///   "cold-uniform":   same positions and masses, zero velocities.
/// Both zero the center-of-mass position and the net momentum. Unknown model
/// names throw std::invalid_argument.
ParticleSystem generate_initial_conditions(std::size_t n, std::uint64_t seed,
                                           const std::string &model);

/// Two equal unit masses on a circular orbit of the given separation about
/// their barycenter (G = 1, softening ignored in the speed since ε ≪ r).
/// Useful as an analytic integration oracle; the orbital period is
/// 2π √(r³/(G·m_total)).
ParticleSystem two_body_circular(double separation = 1.0);

}  // namespace gravtile
