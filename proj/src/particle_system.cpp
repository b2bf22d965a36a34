#include "gravtile/particle_system.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gravtile {

namespace {

bool finite3(const Vec3 &v) {
  return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

void check_vec_field(const std::vector<Vec3> &field, std::size_t n, const char *name) {
  if (field.size() != n) {
    throw std::runtime_error(std::string("ParticleSystem: ") + name + " length mismatch");
  }
  for (const Vec3 &v : field) {
    if (!finite3(v)) {
      throw std::runtime_error(std::string("ParticleSystem: non-finite value in ") + name);
    }
  }
}

}  // namespace

ParticleSystem ParticleSystem::zeros(std::size_t n) {
  ParticleSystem s;
  s.mass.assign(n, n > 0 ? 1.0 / static_cast<double>(n) : 0.0);
  s.pos.assign(n, Vec3{0.0, 0.0, 0.0});
  s.vel.assign(n, Vec3{0.0, 0.0, 0.0});
  s.acc.assign(n, Vec3{0.0, 0.0, 0.0});
  s.jerk.assign(n, Vec3{0.0, 0.0, 0.0});
  s.acc_prev.assign(n, Vec3{0.0, 0.0, 0.0});
  s.jerk_prev.assign(n, Vec3{0.0, 0.0, 0.0});
  return s;
}

void ParticleSystem::validate() const {
  const std::size_t n = mass.size();
  if (n < 1) {
    throw std::runtime_error("ParticleSystem: empty system");
  }
  for (double m : mass) {
    if (!(m > 0.0) || !std::isfinite(m)) {
      throw std::runtime_error("ParticleSystem: masses must be positive and finite");
    }
  }
  check_vec_field(pos, n, "pos");
  check_vec_field(vel, n, "vel");
  check_vec_field(acc, n, "acc");
  check_vec_field(jerk, n, "jerk");
  check_vec_field(acc_prev, n, "acc_prev");
  check_vec_field(jerk_prev, n, "jerk_prev");
  if (!std::isfinite(time) || !std::isfinite(grav_const)) {
    throw std::runtime_error("ParticleSystem: non-finite time or grav_const");
  }
}

}  // namespace gravtile
