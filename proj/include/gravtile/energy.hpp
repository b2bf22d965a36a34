#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "gravtile/particle_system.hpp"

namespace gravtile {

double kinetic_energy(const ParticleSystem &system);

/// Softened pairwise potential, each pair counted once:
///   W = − Σ_{i<j} G mᵢmⱼ / √(r² + ε²)
double potential_energy(const ParticleSystem &system);

/// Specific energy per particle, eᵢ = ½|vᵢ|² − ½ Σ_{j≠i} G mⱼ/√(r²+ε²).
/// The pair term is halved so the mass-weighted sum of eᵢ equals K + W.
std::vector<double> per_particle_energy(const ParticleSystem &system);

struct EnergyReport {
  double kinetic = 0.0;
  double potential = 0.0;
  double total = 0.0;
  std::vector<double> per_particle;
  std::vector<double> bin_edges;      // bins+1 ascending edges
  std::vector<std::size_t> counts;    // histogram of per_particle over edges
};

/// Histogram of the per-particle energies. With no explicit range the edges
/// span [min, max] of the data (degenerate spans are widened symmetrically);
/// out-of-range values are clamped into the end bins so counts always sum
/// to the particle count.
EnergyReport energy_report(const ParticleSystem &system, std::size_t bins = 32,
                           std::optional<std::pair<double, double>> range =
                               std::nullopt);

/// Histogram the given values over explicit shared edges.
std::vector<std::size_t> histogram(const std::vector<double> &values,
                                   const std::vector<double> &edges);

struct DistributionComparison {
  double max_rel_bin_deviation = 0.0;  // max |cₐ−c_b| / max(1, c_b)
  std::size_t worst_bin = 0;
  double threshold = 0.0;
  bool pass = false;
};

/// Compare two histograms produced over bitwise-identical edges; throws if
/// the edges differ. `pass` is max_rel_bin_deviation <= threshold.
DistributionComparison compare_energy_distribution(const EnergyReport &a,
                                                   const EnergyReport &b,
                                                   double threshold = 0.02);

}  // namespace gravtile
