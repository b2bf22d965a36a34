#include "gravtile/hermite.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "gravtile/energy.hpp"
#include "gravtile/workload.hpp"

namespace gravtile {

namespace {

inline double dot(const Vec3 &a, const Vec3 &b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

}  // namespace

void golden_acc_jerk(const ParticleSystem &system, std::vector<Vec3> &acc,
                     std::vector<Vec3> &jerk) {
  const std::size_t n = system.size();
  const double eps2 = kSoftening * kSoftening;
  acc.assign(n, Vec3{0.0, 0.0, 0.0});
  jerk.assign(n, Vec3{0.0, 0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) {
    Vec3 a{0.0, 0.0, 0.0};
    Vec3 j{0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      const Vec3 r{system.pos[k][0] - system.pos[i][0],
                   system.pos[k][1] - system.pos[i][1],
                   system.pos[k][2] - system.pos[i][2]};
      const Vec3 v{system.vel[k][0] - system.vel[i][0],
                   system.vel[k][1] - system.vel[i][1],
                   system.vel[k][2] - system.vel[i][2]};
      const double r2 = dot(r, r) + eps2;
      const double rinv = 1.0 / std::sqrt(r2);
      const double rinv3 = rinv * rinv * rinv;
      const double mu = system.grav_const * system.mass[k];
      const double t = mu * rinv3;
      const double q = -3.0 * dot(r, v) / r2;  // d/dt log r⁻³ factor
      for (int c = 0; c < 3; ++c) {
        a[c] += t * r[c];
        j[c] += t * (v[c] + q * r[c]);
      }
    }
    acc[i] = a;
    jerk[i] = j;
  }
}

void golden_acc_jerk_snap(const ParticleSystem &system, std::vector<Vec3> &acc,
                          std::vector<Vec3> &jerk, std::vector<Vec3> &snap) {
  const std::size_t n = system.size();
  const double eps2 = kSoftening * kSoftening;
  // The snap sum needs the relative acceleration of each pair, i.e. the
  // completed acceleration of every particle, so it cannot share a single
  // pass with the acceleration itself.
  std::vector<Vec3> scratch_jerk;
  golden_acc_jerk(system, acc, scratch_jerk);
  jerk.assign(n, Vec3{0.0, 0.0, 0.0});
  snap.assign(n, Vec3{0.0, 0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) {
    Vec3 jsum{0.0, 0.0, 0.0};
    Vec3 ssum{0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      const Vec3 r{system.pos[k][0] - system.pos[i][0],
                   system.pos[k][1] - system.pos[i][1],
                   system.pos[k][2] - system.pos[i][2]};
      const Vec3 v{system.vel[k][0] - system.vel[i][0],
                   system.vel[k][1] - system.vel[i][1],
                   system.vel[k][2] - system.vel[i][2]};
      const Vec3 da{acc[k][0] - acc[i][0], acc[k][1] - acc[i][1],
                    acc[k][2] - acc[i][2]};
      const double r2 = dot(r, r) + eps2;
      const double rinv2 = 1.0 / r2;
      const double rinv = std::sqrt(rinv2);
      const double rinv3 = rinv * rinv2;
      const double mu = system.grav_const * system.mass[k];
      const double alpha = dot(r, v) * rinv2;
      const double beta = (dot(v, v) + dot(r, da)) * rinv2 + alpha * alpha;
      for (int c = 0; c < 3; ++c) {
        const double ap = mu * rinv3 * r[c];
        const double jp = mu * rinv3 * v[c] - 3.0 * alpha * ap;
        const double sp = mu * rinv3 * da[c] - 6.0 * alpha * jp - 3.0 * beta * ap;
        jsum[c] += jp;
        ssum[c] += sp;
      }
    }
    jerk[i] = jsum;
    snap[i] = ssum;
  }
}

void predict(ParticleSystem &system, double dt) {
  const double dt2 = dt * dt / 2.0;
  const double dt3 = dt * dt * dt / 6.0;
  for (std::size_t i = 0; i < system.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      system.pos[i][c] += system.vel[i][c] * dt + system.acc[i][c] * dt2 +
                          system.jerk[i][c] * dt3;
      system.vel[i][c] += system.acc[i][c] * dt + system.jerk[i][c] * dt2;
    }
  }
}

void predict6(ParticleSystem &system, double dt,
              const std::vector<Vec3> &snap,
              const std::vector<Vec3> &crackle) {
  if (snap.size() != system.size() || crackle.size() != system.size())
    throw std::invalid_argument("predict6: derivative history size mismatch");
  const double dt2 = dt * dt / 2.0;
  const double dt3 = dt * dt * dt / 6.0;
  const double dt4 = dt * dt * dt * dt / 24.0;
  const double dt5 = dt * dt * dt * dt * dt / 120.0;
  for (std::size_t i = 0; i < system.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      system.pos[i][c] += system.vel[i][c] * dt + system.acc[i][c] * dt2 +
                          system.jerk[i][c] * dt3 + snap[i][c] * dt4 +
                          crackle[i][c] * dt5;
      system.vel[i][c] += system.acc[i][c] * dt + system.jerk[i][c] * dt2 +
                          snap[i][c] * dt3 + crackle[i][c] * dt4;
    }
  }
}

void correct(ParticleSystem &system, double dt,
             const std::vector<Vec3> &acc_new,
             const std::vector<Vec3> &jerk_new) {
  const std::size_t n = system.size();
  if (acc_new.size() != n || jerk_new.size() != n)
    throw std::invalid_argument("correct: derivative size mismatch");
  const double h2 = dt / 2.0;
  const double h12 = dt * dt / 12.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) {
      const double v0 = system.vel[i][c];
      const double a0 = system.acc[i][c];
      const double j0 = system.jerk[i][c];
      const double a1 = acc_new[i][c];
      const double j1 = jerk_new[i][c];
      const double v1 = v0 + h2 * (a0 + a1) - h12 * (j1 - j0);
      system.pos[i][c] += h2 * (v0 + v1) - h12 * (a1 - a0);
      system.vel[i][c] = v1;
    }
  }
  system.acc_prev = system.acc;
  system.jerk_prev = system.jerk;
  system.acc = acc_new;
  system.jerk = jerk_new;
}

void correct6(ParticleSystem &system, double dt,
              const std::vector<Vec3> &acc_new,
              const std::vector<Vec3> &jerk_new,
              const std::vector<Vec3> &snap_old,
              const std::vector<Vec3> &snap_new) {
  const std::size_t n = system.size();
  if (acc_new.size() != n || jerk_new.size() != n || snap_old.size() != n ||
      snap_new.size() != n)
    throw std::invalid_argument("correct6: derivative size mismatch");
  const double h2 = dt / 2.0;
  const double h10 = dt * dt / 10.0;
  const double h120 = dt * dt * dt / 120.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) {
      const double v0 = system.vel[i][c];
      const double a0 = system.acc[i][c];
      const double j0 = system.jerk[i][c];
      const double s0 = snap_old[i][c];
      const double a1 = acc_new[i][c];
      const double j1 = jerk_new[i][c];
      const double s1 = snap_new[i][c];
      const double v1 =
          v0 + h2 * (a0 + a1) - h10 * (j1 - j0) + h120 * (s1 + s0);
      system.pos[i][c] +=
          h2 * (v0 + v1) - h10 * (a1 - a0) + h120 * (j1 + j0);
      system.vel[i][c] = v1;
    }
  }
  system.acc_prev = system.acc;
  system.jerk_prev = system.jerk;
  system.acc = acc_new;
  system.jerk = jerk_new;
}

void OracleBackend::evaluate(const ParticleSystem &system,
                             std::vector<Vec3> &acc, std::vector<Vec3> &jerk) {
  golden_acc_jerk(system, acc, jerk);
}

void OracleBackend::evaluate_with_snap(const ParticleSystem &system,
                                       std::vector<Vec3> &acc,
                                       std::vector<Vec3> &jerk,
                                       std::vector<Vec3> &snap) {
  golden_acc_jerk_snap(system, acc, jerk, snap);
}

void DeviceBackend::evaluate(const ParticleSystem &system,
                             std::vector<Vec3> &acc, std::vector<Vec3> &jerk) {
  execute_evaluation(cluster_, system, acc, jerk);
}

HermiteIntegrator::HermiteIntegrator(IntegratorConfig config,
                                     EvalBackend &backend)
    : config_(config), backend_(backend) {
  if (!(config_.dt > 0.0))
    throw std::invalid_argument("integrator dt must be positive");
  if (config_.steps < 0)
    throw std::invalid_argument("integrator steps must be non-negative");
}

void HermiteIntegrator::evaluate(const ParticleSystem &system,
                                 std::vector<Vec3> &acc,
                                 std::vector<Vec3> &jerk,
                                 std::vector<Vec3> *snap) {
  const auto start = std::chrono::steady_clock::now();
  if (snap != nullptr) {
    backend_.evaluate_with_snap(system, acc, jerk, *snap);
  } else {
    backend_.evaluate(system, acc, jerk);
  }
  last_eval_seconds_ =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
}

void HermiteIntegrator::initialize(ParticleSystem &system) {
  system.validate();
  if (config_.order == IntegratorOrder::Hermite6 && !backend_.supports_snap())
    throw std::runtime_error(
        "sixth-order scheme needs snap, which the '" + backend_.name() +
        "' backend does not provide");
  try {
    if (config_.order == IntegratorOrder::Hermite6) {
      evaluate(system, system.acc, system.jerk, &snap_);
      // No crackle history exists yet; start from zero and let the first
      // corrected step rebuild it from the Hermite fit.
      crackle_.assign(system.size(), Vec3{0.0, 0.0, 0.0});
    } else {
      evaluate(system, system.acc, system.jerk, nullptr);
    }
  } catch (const std::exception &e) {
    throw std::runtime_error(std::string("initial evaluation: ") + e.what());
  }
  system.acc_prev = system.acc;
  system.jerk_prev = system.jerk;
  primed_ = true;
}

void HermiteIntegrator::step(ParticleSystem &system) {
  if (!primed_) initialize(system);
  const double dt = config_.dt;
  ParticleSystem trial = system;
  std::vector<Vec3> acc_new, jerk_new;
  if (config_.order == IntegratorOrder::Hermite6) {
    predict6(trial, dt, snap_, crackle_);
    std::vector<Vec3> snap_new;
    evaluate_at_step(trial, acc_new, jerk_new, &snap_new);
    // Fit the crackle at the end of the step from the span of known
    // derivatives: with A = a₁−a₀−ȧ₀h−ä₀h²/2, B = ȧ₁−ȧ₀−ä₀h, C = ä₁−ä₀,
    // the quintic Hermite fit gives c₁ = (60A − 36Bh + 9Ch²)/h³.
    std::vector<Vec3> crackle_new(system.size());
    for (std::size_t i = 0; i < system.size(); ++i) {
      for (int c = 0; c < 3; ++c) {
        const double A = acc_new[i][c] - system.acc[i][c] -
                         system.jerk[i][c] * dt - snap_[i][c] * dt * dt / 2.0;
        const double B = jerk_new[i][c] - system.jerk[i][c] - snap_[i][c] * dt;
        const double C = snap_new[i][c] - snap_[i][c];
        crackle_new[i][c] =
            (60.0 * A - 36.0 * B * dt + 9.0 * C * dt * dt) / (dt * dt * dt);
      }
    }
    correct6(system, dt, acc_new, jerk_new, snap_, snap_new);
    snap_ = std::move(snap_new);
    crackle_ = std::move(crackle_new);
  } else {
    predict(trial, dt);
    evaluate_at_step(trial, acc_new, jerk_new, nullptr);
    correct(system, dt, acc_new, jerk_new);
  }
  system.time += dt;
  ++steps_taken_;
}

void HermiteIntegrator::evaluate_at_step(const ParticleSystem &system,
                                         std::vector<Vec3> &acc,
                                         std::vector<Vec3> &jerk,
                                         std::vector<Vec3> *snap) {
  try {
    evaluate(system, acc, jerk, snap);
  } catch (const std::exception &e) {
    throw std::runtime_error("step " + std::to_string(steps_taken_ + 1) +
                             ": " + e.what());
  }
}

RunDiagnostics HermiteIntegrator::run(ParticleSystem &system) {
  const auto wall_start = std::chrono::steady_clock::now();
  RunDiagnostics diag;
  if (!primed_) initialize(system);
  diag.eval_seconds_total += last_eval_seconds_;

  auto record = [&](int step_index) {
    if (!config_.record_diagnostics) return;
    StepDiagnostics d;
    d.step = step_index;
    d.time = system.time;
    d.kinetic = kinetic_energy(system);
    d.potential = potential_energy(system);
    d.total_energy = d.kinetic + d.potential;
    for (std::size_t i = 0; i < system.size(); ++i)
      for (int c = 0; c < 3; ++c)
        d.momentum[c] += system.mass[i] * system.vel[i][c];
    d.eval_seconds = last_eval_seconds_;
    diag.steps.push_back(d);
  };

  record(0);
  for (int s = 1; s <= config_.steps; ++s) {
    step(system);
    diag.eval_seconds_total += last_eval_seconds_;
    record(s);
  }
  diag.wall_seconds_total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    wall_start)
          .count();
  return diag;
}

}  // namespace gravtile
