#include "gravtile/initial_conditions.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "gravtile/energy.hpp"

namespace gravtile {

namespace {

// Explicit draws instead of std::uniform_real_distribution /
// std::normal_distribution: the standard leaves those implementations
// unspecified, and identical streams across platforms are part of this
// generator's contract.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform01() {
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }

  // Polar Box–Muller; the second variate of each pair is cached.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  Vec3 in_unit_ball() {
    while (true) {
      const Vec3 p{2.0 * uniform01() - 1.0, 2.0 * uniform01() - 1.0,
                   2.0 * uniform01() - 1.0};
      if (p[0] * p[0] + p[1] * p[1] + p[2] * p[2] <= 1.0) return p;
    }
  }

 private:
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

void remove_center_of_mass(ParticleSystem &system) {
  double mtot = 0.0;
  Vec3 com{0.0, 0.0, 0.0};
  Vec3 mom{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < system.size(); ++i) {
    mtot += system.mass[i];
    for (int c = 0; c < 3; ++c) {
      com[c] += system.mass[i] * system.pos[i][c];
      mom[c] += system.mass[i] * system.vel[i][c];
    }
  }
  for (int c = 0; c < 3; ++c) {
    com[c] /= mtot;
    mom[c] /= mtot;
  }
  for (std::size_t i = 0; i < system.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      system.pos[i][c] -= com[c];
      system.vel[i][c] -= mom[c];
    }
  }
}

void scale_to_virial(ParticleSystem &system) {
  const double k = kinetic_energy(system);
  const double w = potential_energy(system);
  if (!(k > 0.0)) return;  // cold system: nothing to scale
  const double factor = std::sqrt(std::abs(w) / (2.0 * k));
  for (auto &v : system.vel)
    for (int c = 0; c < 3; ++c) v[c] *= factor;
}

}  // namespace

ParticleSystem generate_initial_conditions(std::size_t n, std::uint64_t seed,
                                           const std::string &model) {
  if (n < 1)
    throw std::invalid_argument("initial conditions need at least 1 particle");
  const bool cold = (model == "cold-uniform");
  if (!cold && model != "uniform-sphere")
    throw std::invalid_argument("unknown initial-condition model '" + model +
                                "' (expected 'uniform-sphere' or "
                                "'cold-uniform')");

  Sampler sampler(seed);
  ParticleSystem system = ParticleSystem::zeros(n);
  const double m = 1.0 / static_cast<double>(n);
  // All positions are drawn before any velocity so that cold-uniform yields
  // exactly the same spatial sample as uniform-sphere for a given seed.
  for (std::size_t i = 0; i < n; ++i) {
    system.mass[i] = m;
    system.pos[i] = sampler.in_unit_ball();
  }
  for (std::size_t i = 0; i < n && !cold; ++i) {
    system.vel[i] =
        Vec3{sampler.gaussian(), sampler.gaussian(), sampler.gaussian()};
  }
  remove_center_of_mass(system);
  if (!cold) scale_to_virial(system);
  system.validate();
  return system;
}

ParticleSystem two_body_circular(double separation) {
  if (!(separation > 0.0))
    throw std::invalid_argument("two_body_circular: separation must be > 0");
  ParticleSystem system = ParticleSystem::zeros(2);
  const double r = separation / 2.0;  // each body's barycentric radius
  // Circular speed of each unit mass about the barycenter of the 2-mass
  // system: v² = G m_other r / separation² → v = √(G/(2 separation)) · ...
  // worked through: v = √(G m_total / separation) / 2 with m_total = 2.
  const double v = std::sqrt(system.grav_const * 2.0 / separation) / 2.0;
  system.mass = {1.0, 1.0};
  system.pos[0] = Vec3{-r, 0.0, 0.0};
  system.pos[1] = Vec3{+r, 0.0, 0.0};
  system.vel[0] = Vec3{0.0, -v, 0.0};
  system.vel[1] = Vec3{0.0, +v, 0.0};
  return system;
}

}  // namespace gravtile
