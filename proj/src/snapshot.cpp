#include "gravtile/snapshot.hpp"

#include <cinttypes>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "gravtile/io_util.hpp"

namespace gravtile {

namespace {

void append_g17(std::string &out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

std::string snapshot_to_string(const ParticleSystem &system) {
  const std::size_t n = system.size();
  std::string out;
  out.reserve(n * 160 + 64);
  out += "# gravtile v1 n=" + std::to_string(n) + " t=";
  append_g17(out, system.time);
  out += " G=";
  append_g17(out, system.grav_const);
  out += "\n";
  for (std::size_t i = 0; i < n; ++i) {
    append_g17(out, system.mass[i]);
    for (int c = 0; c < 3; ++c) {
      out += ' ';
      append_g17(out, system.pos[i][c]);
    }
    for (int c = 0; c < 3; ++c) {
      out += ' ';
      append_g17(out, system.vel[i][c]);
    }
    out += '\n';
  }
  return out;
}

ParticleSystem snapshot_from_string(const std::string &text) {
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header)) {
    throw std::runtime_error("snapshot: empty input");
  }
  std::uint64_t n = 0;
  double t = 0.0;
  double g = 0.0;
  if (std::sscanf(header.c_str(), "# gravtile v1 n=%" SCNu64 " t=%lf G=%lf", &n, &t, &g) != 3) {
    throw std::runtime_error("snapshot: bad header: " + header);
  }
  ParticleSystem s = ParticleSystem::zeros(n);
  s.time = t;
  s.grav_const = g;
  for (std::size_t i = 0; i < n; ++i) {
    std::string line;
    if (!std::getline(in, line)) {
      throw std::runtime_error("snapshot: truncated at particle " + std::to_string(i));
    }
    double m, x, y, z, vx, vy, vz;
    if (std::sscanf(line.c_str(), "%lf %lf %lf %lf %lf %lf %lf", &m, &x, &y, &z, &vx, &vy, &vz) !=
        7) {
      throw std::runtime_error("snapshot: bad particle line " + std::to_string(i));
    }
    s.mass[i] = m;
    s.pos[i] = {x, y, z};
    s.vel[i] = {vx, vy, vz};
  }
  s.validate();
  return s;
}

void write_snapshot(const std::filesystem::path &path, const ParticleSystem &system) {
  atomic_write_file(path, snapshot_to_string(system));
}

ParticleSystem read_snapshot(const std::filesystem::path &path) {
  return snapshot_from_string(read_file(path));
}

}  // namespace gravtile
