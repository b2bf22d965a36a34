#include "gravtile/trace.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gravtile {

namespace {

// Piecewise-linear between samples, flat beyond the ends. Returns whether
// the query point required clamping.
double sample_channel(const Channel &c, double time, bool *clamped) {
  if (time <= c.t.front()) {
    if (clamped && time < c.t.front()) *clamped = true;
    return c.v.front();
  }
  if (time >= c.t.back()) {
    if (clamped && time > c.t.back()) *clamped = true;
    return c.v.back();
  }
  const auto it = std::upper_bound(c.t.begin(), c.t.end(), time);
  const std::size_t hi = static_cast<std::size_t>(it - c.t.begin());
  const std::size_t lo = hi - 1;
  const double w = (time - c.t[lo]) / (c.t[hi] - c.t[lo]);
  return c.v[lo] + w * (c.v[hi] - c.v[lo]);
}

}  // namespace

void Channel::validate() const {
  if (name.empty()) throw std::invalid_argument("channel has no name");
  if (t.size() != v.size())
    throw std::invalid_argument("channel '" + name +
                                "': timestamp/value count mismatch");
  if (t.empty())
    throw std::invalid_argument("channel '" + name + "' has no samples");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i]) || !std::isfinite(v[i]))
      throw std::invalid_argument("channel '" + name +
                                  "' contains a non-finite sample");
    if (i > 0 && !(t[i] > t[i - 1]))
      throw std::invalid_argument("channel '" + name +
                                  "': timestamps must be strictly increasing");
  }
}

double integrate_power(const Channel &channel, const Window &window) {
  channel.validate();
  if (channel.kind != ChannelKind::Power)
    throw std::invalid_argument("channel '" + channel.name +
                                "' is not a power channel");
  if (channel.t.size() < 2)
    throw std::invalid_argument("channel '" + channel.name +
                                "' needs at least 2 samples to integrate");
  if (!(window.t_end > window.t_start))
    throw std::invalid_argument("integration window is empty");
  if (window.t_end <= channel.t_begin() || window.t_start >= channel.t_end())
    throw std::invalid_argument(
        "window does not overlap the samples of channel '" + channel.name +
        "'");

  // Breakpoints: window edges plus every sample strictly inside the window.
  std::vector<double> knots;
  knots.push_back(window.t_start);
  for (double ts : channel.t)
    if (ts > window.t_start && ts < window.t_end) knots.push_back(ts);
  knots.push_back(window.t_end);

  double joules = 0.0;
  double prev_t = knots.front();
  double prev_v = sample_channel(channel, prev_t, nullptr);
  for (std::size_t i = 1; i < knots.size(); ++i) {
    const double cur_t = knots[i];
    const double cur_v = sample_channel(channel, cur_t, nullptr);
    joules += 0.5 * (prev_v + cur_v) * (cur_t - prev_t);
    prev_t = cur_t;
    prev_v = cur_v;
  }
  return joules;
}

Channel energy_channel_to_power(const Channel &channel) {
  channel.validate();
  if (channel.kind != ChannelKind::Energy)
    throw std::invalid_argument("channel '" + channel.name +
                                "' is not a cumulative-energy channel");
  if (channel.t.size() < 2)
    throw std::invalid_argument("channel '" + channel.name +
                                "' needs at least 2 samples to differentiate");
  Channel power;
  power.name = channel.name;
  power.kind = ChannelKind::Power;
  power.t.reserve(channel.t.size() - 1);
  power.v.reserve(channel.t.size() - 1);
  for (std::size_t i = 0; i + 1 < channel.t.size(); ++i) {
    const double de = channel.v[i + 1] - channel.v[i];
    if (de < 0.0)
      throw std::invalid_argument("channel '" + channel.name +
                                  "': cumulative energy decreases at sample " +
                                  std::to_string(i + 1));
    power.t.push_back(0.5 * (channel.t[i] + channel.t[i + 1]));
    power.v.push_back(de / (channel.t[i + 1] - channel.t[i]));
  }
  return power;
}

CombinedPower total_power(const std::vector<Channel> &channels) {
  if (channels.empty())
    throw std::invalid_argument("total_power needs at least one channel");
  for (const auto &c : channels) {
    c.validate();
    if (c.kind != ChannelKind::Power)
      throw std::invalid_argument("channel '" + c.name +
                                  "' is not a power channel");
  }
  std::set<double> grid;
  for (const auto &c : channels) grid.insert(c.t.begin(), c.t.end());

  CombinedPower out;
  out.sum.name = "total";
  out.sum.kind = ChannelKind::Power;
  out.sum.t.assign(grid.begin(), grid.end());
  out.sum.v.resize(out.sum.t.size(), 0.0);
  for (const auto &c : channels) {
    for (std::size_t i = 0; i < out.sum.t.size(); ++i) {
      bool clamped = false;
      out.sum.v[i] += sample_channel(c, out.sum.t[i], &clamped);
      if (clamped) out.clamped_extrapolation = true;
    }
  }
  return out;
}

double peak_power(const Channel &channel, const Window &window) {
  channel.validate();
  if (channel.kind != ChannelKind::Power)
    throw std::invalid_argument("channel '" + channel.name +
                                "' is not a power channel");
  if (!(window.t_end > window.t_start))
    throw std::invalid_argument("peak-power window is empty");
  double peak = sample_channel(channel, window.t_start, nullptr);
  peak = std::max(peak, sample_channel(channel, window.t_end, nullptr));
  for (std::size_t i = 0; i < channel.t.size(); ++i) {
    if (channel.t[i] >= window.t_start && channel.t[i] <= window.t_end)
      peak = std::max(peak, channel.v[i]);
  }
  return peak;
}

Channel parse_channel(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  Channel c;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    std::istringstream ls(line);
    if (!have_header) {
      std::string hash, channel_kv, kind_kv, unit_kv;
      ls >> hash >> channel_kv >> kind_kv >> unit_kv;
      if (hash != "#" || channel_kv.rfind("channel=", 0) != 0 ||
          kind_kv.rfind("kind=", 0) != 0 || unit_kv.rfind("unit=", 0) != 0)
        throw std::invalid_argument(
            "trace line " + std::to_string(line_no) +
            ": expected header '# channel=<name> kind=<power|energy> "
            "unit=<W|J>'");
      c.name = channel_kv.substr(8);
      const std::string kind = kind_kv.substr(5);
      const std::string unit = unit_kv.substr(5);
      if (kind == "power" && unit == "W") {
        c.kind = ChannelKind::Power;
      } else if (kind == "energy" && unit == "J") {
        c.kind = ChannelKind::Energy;
      } else {
        throw std::invalid_argument("trace line " + std::to_string(line_no) +
                                    ": unsupported kind/unit '" + kind + "/" +
                                    unit + "'");
      }
      have_header = true;
      continue;
    }
    double ts = 0.0, val = 0.0;
    if (!(ls >> ts >> val))
      throw std::invalid_argument("trace line " + std::to_string(line_no) +
                                  ": expected 'timestamp value'");
    std::string extra;
    if (ls >> extra)
      throw std::invalid_argument("trace line " + std::to_string(line_no) +
                                  ": trailing content '" + extra + "'");
    c.t.push_back(ts);
    c.v.push_back(val);
  }
  if (!have_header)
    throw std::invalid_argument("trace has no channel header line");
  c.validate();
  return c;
}

std::string serialize_channel(const Channel &channel) {
  channel.validate();
  std::ostringstream out;
  out.precision(17);
  out << "# channel=" << channel.name << " kind="
      << (channel.kind == ChannelKind::Power ? "power" : "energy") << " unit="
      << (channel.kind == ChannelKind::Power ? "W" : "J") << "\n";
  for (std::size_t i = 0; i < channel.t.size(); ++i)
    out << channel.t[i] << " " << channel.v[i] << "\n";
  return out.str();
}

}  // namespace gravtile
