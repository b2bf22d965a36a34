#include "gravtile/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gravtile/workload.hpp"

namespace gravtile {

double kinetic_energy(const ParticleSystem &system) {
  double k = 0.0;
  for (std::size_t i = 0; i < system.size(); ++i) {
    const auto &v = system.vel[i];
    k += 0.5 * system.mass[i] * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  }
  return k;
}

double potential_energy(const ParticleSystem &system) {
  const double eps2 = kSoftening * kSoftening;
  double w = 0.0;
  for (std::size_t i = 0; i < system.size(); ++i) {
    for (std::size_t j = i + 1; j < system.size(); ++j) {
      const double dx = system.pos[j][0] - system.pos[i][0];
      const double dy = system.pos[j][1] - system.pos[i][1];
      const double dz = system.pos[j][2] - system.pos[i][2];
      const double r = std::sqrt(dx * dx + dy * dy + dz * dz + eps2);
      w -= system.grav_const * system.mass[i] * system.mass[j] / r;
    }
  }
  return w;
}

std::vector<double> per_particle_energy(const ParticleSystem &system) {
  const std::size_t n = system.size();
  const double eps2 = kSoftening * kSoftening;
  std::vector<double> e(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto &v = system.vel[i];
    e[i] = 0.5 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = system.pos[j][0] - system.pos[i][0];
      const double dy = system.pos[j][1] - system.pos[i][1];
      const double dz = system.pos[j][2] - system.pos[i][2];
      const double rinv =
          1.0 / std::sqrt(dx * dx + dy * dy + dz * dz + eps2);
      // Half the pair potential to each side so Σ mᵢeᵢ reproduces K + W.
      e[i] -= 0.5 * system.grav_const * system.mass[j] * rinv;
      e[j] -= 0.5 * system.grav_const * system.mass[i] * rinv;
    }
  }
  return e;
}

std::vector<std::size_t> histogram(const std::vector<double> &values,
                                   const std::vector<double> &edges) {
  if (edges.size() < 2)
    throw std::invalid_argument("histogram needs at least two bin edges");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i] > edges[i - 1]))
      throw std::invalid_argument("histogram edges must be strictly ascending");
  const std::size_t bins = edges.size() - 1;
  std::vector<std::size_t> counts(bins, 0);
  for (double v : values) {
    if (!std::isfinite(v))
      throw std::invalid_argument("histogram input contains a non-finite value");
    std::size_t b;
    if (v <= edges.front()) {
      b = 0;
    } else if (v >= edges.back()) {
      b = bins - 1;
    } else {
      const auto it = std::upper_bound(edges.begin(), edges.end(), v);
      b = static_cast<std::size_t>(it - edges.begin()) - 1;
    }
    ++counts[b];
  }
  return counts;
}

EnergyReport energy_report(const ParticleSystem &system, std::size_t bins,
                           std::optional<std::pair<double, double>> range) {
  if (bins == 0) throw std::invalid_argument("energy_report: bins must be >= 1");
  EnergyReport rep;
  rep.kinetic = kinetic_energy(system);
  rep.potential = potential_energy(system);
  rep.total = rep.kinetic + rep.potential;
  rep.per_particle = per_particle_energy(system);

  double lo, hi;
  if (range) {
    lo = range->first;
    hi = range->second;
    if (!(hi > lo))
      throw std::invalid_argument(
          "energy_report: range upper edge must exceed lower edge");
  } else {
    if (rep.per_particle.empty())
      throw std::invalid_argument("energy_report: empty system needs a range");
    const auto [mn, mx] =
        std::minmax_element(rep.per_particle.begin(), rep.per_particle.end());
    lo = *mn;
    hi = *mx;
    if (!(hi > lo)) {  // all values identical: widen to a usable span
      const double pad = std::max(1.0, std::abs(lo)) * 1e-9;
      lo -= pad;
      hi += pad;
    }
  }
  rep.bin_edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    rep.bin_edges[i] =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  }
  rep.bin_edges.front() = lo;
  rep.bin_edges.back() = hi;
  rep.counts = histogram(rep.per_particle, rep.bin_edges);
  return rep;
}

DistributionComparison compare_energy_distribution(const EnergyReport &a,
                                                   const EnergyReport &b,
                                                   double threshold) {
  if (a.bin_edges.size() != b.bin_edges.size() ||
      !std::equal(a.bin_edges.begin(), a.bin_edges.end(),
                  b.bin_edges.begin()))
    throw std::invalid_argument(
        "energy distributions were built over different bin edges");
  if (a.counts.size() != b.counts.size())
    throw std::invalid_argument("energy distribution bin counts differ");
  DistributionComparison cmp;
  cmp.threshold = threshold;
  for (std::size_t i = 0; i < a.counts.size(); ++i) {
    const double ca = static_cast<double>(a.counts[i]);
    const double cb = static_cast<double>(b.counts[i]);
    const double dev = std::abs(ca - cb) / std::max(1.0, cb);
    if (dev > cmp.max_rel_bin_deviation) {
      cmp.max_rel_bin_deviation = dev;
      cmp.worst_bin = i;
    }
  }
  cmp.pass = cmp.max_rel_bin_deviation <= threshold;
  return cmp;
}

}  // namespace gravtile
