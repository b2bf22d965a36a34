#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "gravtile/particle_system.hpp"
#include "gravtile/topology.hpp"

namespace gravtile {

/// Serial 64-bit brute-force acceleration and jerk:
///   a_i = Σ_{j≠i} G m_j r_ij / (r² + ε²)^{3/2}
///   ȧ_i = Σ_{j≠i} G m_j [ v_ij/(r²+ε²)^{3/2} − 3 (r_ij·v_ij) r_ij/(r²+ε²)^{5/2} ]
/// with r_ij = r_j − r_i, v_ij = v_j − v_i, ε the shared softening length,
/// summed in ascending j order. This is the reference every accelerated
/// path is validated against.
void golden_acc_jerk(const ParticleSystem &system, std::vector<Vec3> &acc,
                     std::vector<Vec3> &jerk);

/// Same, plus the snap (second derivative of velocity), which requires the
/// relative accelerations and therefore a second pass:
///   ä_i = Σ G m_j [ a_ij/r³ − 6α ĵ_ij − 3β â_ij ],
///   α = (r·v)/r², β = (|v|² + r·a)/r² + α²,
/// where â/ĵ are the pair's acceleration/jerk contributions and every r²
/// carries the softening term.
void golden_acc_jerk_snap(const ParticleSystem &system, std::vector<Vec3> &acc,
                          std::vector<Vec3> &jerk, std::vector<Vec3> &snap);

/// Taylor-predict positions and velocities in place:
///   x ← x + v dt + a dt²/2 + ȧ dt³/6,  v ← v + a dt + ȧ dt²/2.
void predict(ParticleSystem &system, double dt);

/// Sixth-order variant carrying snap and crackle terms (dt⁴/24, dt⁵/120).
void predict6(ParticleSystem &system, double dt,
              const std::vector<Vec3> &snap, const std::vector<Vec3> &crackle);

/// Two-point Hermite corrector. Reads the system's current pos/vel as the
/// step-start state and acc/jerk as the step-start derivatives:
///   v₁ = v₀ + dt/2 (a₀+a₁) − dt²/12 (ȧ₁−ȧ₀)
///   x₁ = x₀ + dt/2 (v₀+v₁) − dt²/12 (a₁−a₀)
/// then rotates the derivative history (acc_prev ← a₀, acc ← a₁, same for
/// jerk). Time is advanced by the integrator, not here.
void correct(ParticleSystem &system, double dt,
             const std::vector<Vec3> &acc_new,
             const std::vector<Vec3> &jerk_new);

/// Sixth-order corrector (dt²/10, dt³/120 weights) plus snap history.
void correct6(ParticleSystem &system, double dt,
              const std::vector<Vec3> &acc_new,
              const std::vector<Vec3> &jerk_new,
              const std::vector<Vec3> &snap_old,
              const std::vector<Vec3> &snap_new);

enum class IntegratorOrder { Hermite4, Hermite6 };

/// Force-evaluation backend: the 64-bit oracle or the simulated device.
class EvalBackend {
 public:
  virtual ~EvalBackend() = default;
  virtual std::string name() const = 0;
  virtual void evaluate(const ParticleSystem &system, std::vector<Vec3> &acc,
                        std::vector<Vec3> &jerk) = 0;
  virtual bool supports_snap() const { return false; }
  virtual void evaluate_with_snap(const ParticleSystem &, std::vector<Vec3> &,
                                  std::vector<Vec3> &, std::vector<Vec3> &) {
    throw std::logic_error(name() + ": snap evaluation not supported");
  }
};

class OracleBackend final : public EvalBackend {
 public:
  std::string name() const override { return "oracle"; }
  void evaluate(const ParticleSystem &system, std::vector<Vec3> &acc,
                std::vector<Vec3> &jerk) override;
  bool supports_snap() const override { return true; }
  void evaluate_with_snap(const ParticleSystem &system, std::vector<Vec3> &acc,
                          std::vector<Vec3> &jerk,
                          std::vector<Vec3> &snap) override;
};

/// Evaluates on the simulated cluster; does not provide snap (the tile
/// pipeline produces acceleration and jerk only), so it supports the
/// fourth-order scheme exclusively.
class DeviceBackend final : public EvalBackend {
 public:
  explicit DeviceBackend(ClusterConfig &cluster) : cluster_(cluster) {}
  std::string name() const override { return "device"; }
  void evaluate(const ParticleSystem &system, std::vector<Vec3> &acc,
                std::vector<Vec3> &jerk) override;

 private:
  ClusterConfig &cluster_;
};

struct IntegratorConfig {
  double dt = 0.01;
  int steps = 0;
  IntegratorOrder order = IntegratorOrder::Hermite4;
  bool record_diagnostics = true;
};

struct StepDiagnostics {
  int step = 0;
  double time = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
  double total_energy = 0.0;
  Vec3 momentum{0.0, 0.0, 0.0};
  double eval_seconds = 0.0;
};

struct RunDiagnostics {
  std::vector<StepDiagnostics> steps;  // entry 0 is the initial state
  double eval_seconds_total = 0.0;
  double wall_seconds_total = 0.0;
};

/// Prediction–evaluation–correction driver. dt is fixed and shared by all
/// particles; the prediction runs on a scratch copy so the corrector sees
/// the unmodified step-start state.
class HermiteIntegrator {
 public:
  HermiteIntegrator(IntegratorConfig config, EvalBackend &backend);

  /// Evaluate derivatives for the current state; called implicitly by the
  /// first step()/run() if needed. Throws for Hermite6 on a backend that
  /// cannot supply snap.
  void initialize(ParticleSystem &system);

  void step(ParticleSystem &system);

  /// initialize + `config.steps` steps, with per-step diagnostics.
  RunDiagnostics run(ParticleSystem &system);

 private:
  void evaluate(const ParticleSystem &system, std::vector<Vec3> &acc,
                std::vector<Vec3> &jerk, std::vector<Vec3> *snap);
  // Same, but backend failures are rethrown tagged with the 1-based index
  // of the step being taken.
  void evaluate_at_step(const ParticleSystem &system, std::vector<Vec3> &acc,
                        std::vector<Vec3> &jerk, std::vector<Vec3> *snap);

  IntegratorConfig config_;
  EvalBackend &backend_;
  bool primed_ = false;
  int steps_taken_ = 0;
  // Hermite6 history (unused by Hermite4)
  std::vector<Vec3> snap_, crackle_;
  double last_eval_seconds_ = 0.0;
};

}  // namespace gravtile
