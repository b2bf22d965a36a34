#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace gravtile {

enum class ChannelKind { Power, Energy };

/// One sampled telemetry channel: instantaneous watts or cumulative joules.
struct Channel {
  std::string name;
  ChannelKind kind = ChannelKind::Power;
  std::vector<double> t;  // seconds, strictly increasing
  std::vector<double> v;

  void validate() const;  // throws std::invalid_argument on violations
  double t_begin() const { return t.front(); }
  double t_end() const { return t.back(); }
};

/// Active measurement interval; samples outside it are quiescent padding.
struct Window {
  double t_start = 0.0;
  double t_end = 0.0;
  double duration() const { return t_end - t_start; }
};

struct EnergyTrace {
  std::vector<Channel> channels;
  Window window;
};

/// Trapezoidal integral (joules) of a power channel over the window. The
/// channel is treated as piecewise linear between samples and constant
/// beyond its first/last sample; the window must overlap the sampled
/// extent and the channel must carry ≥ 2 samples.
double integrate_power(const Channel &channel, const Window &window);

/// Forward differences of a non-decreasing cumulative-energy channel,
/// reported at interval midpoints as a power channel.
Channel energy_channel_to_power(const Channel &channel);

struct CombinedPower {
  Channel sum;  // union timestamp grid, summed watts
  bool clamped_extrapolation = false;  // some channel was extended flat
};

/// Sum power channels on the union of their timestamps, interpolating each
/// linearly and clamping beyond its extent (flagged).
CombinedPower total_power(const std::vector<Channel> &channels);

/// Max of the channel's interpolation over the window (samples inside plus
/// the interpolated window edges).
double peak_power(const Channel &channel, const Window &window);

/// One channel per file: header `# channel=<name> kind=<power|energy>
/// unit=<W|J>` followed by `timestamp value` rows.
Channel parse_channel(const std::string &text);
std::string serialize_channel(const Channel &channel);

}  // namespace gravtile
