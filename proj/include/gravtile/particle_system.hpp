#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace gravtile {

using Vec3 = std::array<double, 3>;

/// Precision split: force/jerk evaluation runs in 32-bit arithmetic on the
/// simulated device (one rounding per elementary operation), everything on
/// the host side (prediction, correction, oracle) runs in 64-bit.
enum class EvalPrecision { fp32 };
enum class HostPrecision { fp64 };

struct PrecisionPolicy {
  EvalPrecision eval_precision = EvalPrecision::fp32;
  HostPrecision host_precision = HostPrecision::fp64;
};

/// The simulation state in host precision: masses, positions, velocities,
/// plus current and previous-step accelerations and jerks for the corrector.
/// Units are normalized; grav_const defaults to 1.
struct ParticleSystem {
  std::vector<double> mass;
  std::vector<Vec3> pos;
  std::vector<Vec3> vel;
  std::vector<Vec3> acc;
  std::vector<Vec3> jerk;
  std::vector<Vec3> acc_prev;
  std::vector<Vec3> jerk_prev;
  double time = 0.0;
  double grav_const = 1.0;

  std::size_t size() const { return mass.size(); }

  /// n particles at rest at the origin with unit total mass.
  static ParticleSystem zeros(std::size_t n);

  /// Throws std::runtime_error if any invariant is violated: n >= 1, all
  /// masses > 0, equal array lengths, no NaN/Inf anywhere, finite time.
  void validate() const;
};

}  // namespace gravtile
