// Power-trace arithmetic (integration, differentiation, combination), the
// strong-scaling table, and the synthetic measurement pipeline.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "gravtile/bench.hpp"
#include "gravtile/trace.hpp"

using namespace gravtile;

namespace {

constexpr double kPi = 3.14159265358979323846;

Channel make_power(const std::string &name, std::vector<double> t,
                   std::vector<double> v) {
  Channel c;
  c.name = name;
  c.kind = ChannelKind::Power;
  c.t = std::move(t);
  c.v = std::move(v);
  return c;
}

Channel make_energy(const std::string &name, std::vector<double> t,
                    std::vector<double> v) {
  Channel c = make_power(name, std::move(t), std::move(v));
  c.kind = ChannelKind::Energy;
  return c;
}

// straight interpolation of one channel with flat clamping, used as the
// dense-grid oracle for total_power
double interp(const Channel &c, double time) {
  if (time <= c.t.front()) return c.v.front();
  if (time >= c.t.back()) return c.v.back();
  std::size_t k = 1;
  while (c.t[k] < time) ++k;
  const double f = (time - c.t[k - 1]) / (c.t[k] - c.t[k - 1]);
  return c.v[k - 1] + f * (c.v[k] - c.v[k - 1]);
}

}  // namespace

TEST_CASE("channel validation") {
  CHECK_NOTHROW(make_power("ok", {0, 1}, {5, 5}).validate());
  CHECK_THROWS_AS(make_power("", {0, 1}, {5, 5}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make_power("x", {0, 1}, {5}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make_power("x", {}, {}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make_power("x", {0, 0}, {1, 1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make_power("x", {1, 0}, {1, 1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make_power("x", {0, 1}, {1, NAN}).validate(), std::invalid_argument);
}

TEST_CASE("integrate_power: rectangle is exact") {
  const Channel c = make_power("cpu", {0, 1, 2, 3, 4}, {100, 100, 100, 100, 100});
  CHECK(integrate_power(c, Window{1.0, 3.0}) == 200.0);
  CHECK(integrate_power(c, Window{0.0, 4.0}) == 400.0);
}

TEST_CASE("integrate_power: linear ramp gives the triangle area") {
  const Channel c = make_power("cpu", {0, 1, 2}, {0, 50, 100});
  CHECK(integrate_power(c, Window{0.0, 2.0}) == 100.0);
}

TEST_CASE("integrate_power: sinusoid within the trapezoid error bound") {
  // f(t) = 50 + 25 sin(2*pi*t/20) over one full period, sampled at 1 Hz.
  Channel c;
  c.name = "sin";
  c.kind = ChannelKind::Power;
  for (int k = 0; k <= 20; ++k) {
    c.t.push_back(k);
    c.v.push_back(50.0 + 25.0 * std::sin(2.0 * kPi * k / 20.0));
  }
  const double analytic = 50.0 * 20.0;  // the sine integrates to zero
  const double numeric = integrate_power(c, Window{0.0, 20.0});
  // |error| <= (b-a) h^2/12 * max|f''| = 20/12 * 25 (2*pi/20)^2 = 4.11...
  CHECK(std::fabs(numeric - analytic) <= 4.2);
}

TEST_CASE("integrate_power: window additivity") {
  const Channel c = make_power("cpu", {0, 1, 2, 3, 4, 5}, {3, 9, 4, 8, 1, 7});
  const double whole = integrate_power(c, Window{0.3, 4.7});
  const double parts = integrate_power(c, Window{0.3, 2.1}) +
                       integrate_power(c, Window{2.1, 4.7});
  CHECK(whole == doctest::Approx(parts).epsilon(1e-13));
}

TEST_CASE("integrate_power: flat extension beyond the sampled extent") {
  const Channel c = make_power("cpu", {0, 2}, {100, 100});
  // window half inside, half clamped continuation
  CHECK(integrate_power(c, Window{1.0, 3.0}) == 200.0);
  CHECK(integrate_power(c, Window{0.0, 4.0}) == 400.0);
}

TEST_CASE("integrate_power: rejected inputs") {
  const Channel c = make_power("cpu", {0, 2}, {100, 100});
  CHECK_THROWS_AS(integrate_power(c, Window{3.0, 5.0}), std::invalid_argument);
  CHECK_THROWS_AS(integrate_power(c, Window{2.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(integrate_power(c, Window{1.0, 1.0}), std::invalid_argument);
  const Channel e = make_energy("host", {0, 2}, {0, 100});
  CHECK_THROWS_AS(integrate_power(e, Window{0.0, 2.0}), std::invalid_argument);
  const Channel single = make_power("one", {0}, {5});
  CHECK_THROWS_AS(integrate_power(single, Window{0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("energy_channel_to_power: forward differences at midpoints") {
  const Channel e = make_energy("host", {0, 1, 2}, {0, 100, 200});
  const Channel p = energy_channel_to_power(e);
  CHECK(p.kind == ChannelKind::Power);
  REQUIRE(p.t.size() == 2);
  CHECK(p.t[0] == 0.5);
  CHECK(p.t[1] == 1.5);
  CHECK(p.v[0] == 100.0);
  CHECK(p.v[1] == 100.0);

  const Channel flat = make_energy("idle", {0, 1, 2, 3}, {7, 7, 7, 7});
  const Channel zero = energy_channel_to_power(flat);
  for (double w : zero.v) CHECK(w == 0.0);

  const Channel down = make_energy("bad", {0, 1, 2}, {10, 5, 8});
  CHECK_THROWS_WITH_AS(energy_channel_to_power(down),
                       doctest::Contains("decreas"), std::invalid_argument);
  const Channel power_kind = make_power("p", {0, 1}, {1, 2});
  CHECK_THROWS_AS(energy_channel_to_power(power_kind), std::invalid_argument);
}

TEST_CASE("integrate(derive(energy)) returns the energy increment exactly") {
  // uniform sampling: the clamped-midpoint trapezoid sum telescopes
  const Channel e = make_energy("host", {0, 1, 2, 3, 4}, {0, 3, 7, 20, 21});
  const Channel p = energy_channel_to_power(e);
  const double back = integrate_power(p, Window{0.0, 4.0});
  CHECK(back == 21.0);
}

TEST_CASE("total_power: identical channels double") {
  const Channel c = make_power("a", {0, 1, 2}, {30, 60, 90});
  const CombinedPower sum = total_power({c, c});
  REQUIRE(sum.sum.t == c.t);
  for (std::size_t k = 0; k < c.v.size(); ++k) CHECK(sum.sum.v[k] == 2.0 * c.v[k]);
  CHECK(!sum.clamped_extrapolation);
}

TEST_CASE("total_power: offset constant channels sum to a constant") {
  const Channel a = make_power("a", {0.0, 1.0, 2.0}, {100, 100, 100});
  const Channel b = make_power("b", {0.5, 1.5, 2.5}, {50, 50, 50});
  const CombinedPower sum = total_power({a, b});
  CHECK(sum.clamped_extrapolation);  // each channel is extended at one end
  REQUIRE(sum.sum.t.size() == 6);    // union of the two grids
  for (double w : sum.sum.v) CHECK(w == 150.0);
  CHECK(peak_power(sum.sum, Window{0.0, 2.5}) == 150.0);
}

TEST_CASE("total_power matches a dense-grid interpolation oracle") {
  const Channel a = make_power("a", {0.0, 0.7, 1.9, 3.0}, {10, 40, 20, 35});
  const Channel b = make_power("b", {0.3, 1.1, 2.5}, {5, 25, 0});
  const CombinedPower sum = total_power({a, b});
  for (int k = 0; k <= 300; ++k) {
    const double t = 0.01 * k;
    const double expect = interp(a, t) + interp(b, t);
    CHECK(interp(sum.sum, t) == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK_THROWS_AS(total_power({}), std::invalid_argument);
  const Channel e = make_energy("x", {0, 1}, {0, 1});
  CHECK_THROWS_AS(total_power({e}), std::invalid_argument);
}

TEST_CASE("peak_power interpolates the window edges") {
  Channel ramp = make_power("r", {0, 10}, {0, 100});
  CHECK(peak_power(ramp, Window{2.0, 3.5}) == doctest::Approx(35.0));
  CHECK(peak_power(ramp, Window{0.0, 10.0}) == 100.0);
  const Channel spike = make_power("s", {0, 1, 2}, {10, 90, 10});
  CHECK(peak_power(spike, Window{0.5, 1.5}) == 90.0);  // interior sample wins
  CHECK_THROWS_AS(peak_power(ramp, Window{3.0, 3.0}), std::invalid_argument);
}

TEST_CASE("scaling_report: ideal, flat, and published inputs") {
  SUBCASE("perfect halving") {
    const auto rows = scaling_report({{1, 100.0}, {2, 50.0}});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].speedup == 1.0);
    CHECK(rows[0].efficiency == 1.0);
    CHECK(rows[1].speedup == 2.0);
    CHECK(rows[1].efficiency == 1.0);
  }
  SUBCASE("no gain") {
    const auto rows = scaling_report({{2, 100.0}, {1, 100.0}});  // any order in
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].ranks == 1);  // rows come back sorted
    CHECK(rows[1].speedup == 1.0);
    CHECK(rows[1].efficiency == 0.5);
  }
  SUBCASE("published two-card times") {
    const auto rows = scaling_report({{1, 1459.46}, {2, 1318.54}});
    CHECK(std::fabs(rows[1].speedup - 1.10) <= 0.01);
    CHECK(std::fabs(rows[1].efficiency - 0.55) <= 0.01);
  }
  SUBCASE("rejected inputs") {
    CHECK_THROWS_AS(scaling_report({}), std::invalid_argument);
    CHECK_THROWS_AS(scaling_report({{2, 50.0}}), std::invalid_argument);  // no baseline
    CHECK_THROWS_AS(scaling_report({{1, 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(scaling_report({{0, 10.0}}), std::invalid_argument);
  }
}

TEST_CASE("synthesize_trace: structure and window alignment") {
  PowerModelParams params;  // 1 Hz, 4 s quiescence, 150/100/15 W
  const EnergyTrace trace = synthesize_trace(2.0, 2, params);
  REQUIRE(trace.channels.size() == 3);  // 2 chips + host
  CHECK(trace.window.t_start == 4.0);
  CHECK(trace.window.t_end == 6.0);

  const Channel &host = trace.channels.back();
  CHECK(host.kind == ChannelKind::Energy);
  REQUIRE(host.t.size() == 11);  // 1 Hz samples covering 4 + 2 + 4 seconds
  CHECK(host.v.back() == 150.0 * host.t.back());

  for (std::size_t c = 0; c < 2; ++c) {
    const Channel &chip = trace.channels[c];
    CHECK(chip.kind == ChannelKind::Power);
    for (std::size_t k = 0; k < chip.t.size(); ++k) {
      const bool active = chip.t[k] >= 4.0 && chip.t[k] <= 6.0;
      CHECK(chip.v[k] == (active ? 100.0 : 15.0));
    }
  }
  CHECK_THROWS_AS(synthesize_trace(0.0, 1, params), std::invalid_argument);
  PowerModelParams bad = params;
  bad.sample_hz = 0.0;
  CHECK_THROWS_AS(synthesize_trace(1.0, 1, bad), std::invalid_argument);
  bad = params;
  bad.quiescence_s = -1.0;
  CHECK_THROWS_AS(synthesize_trace(1.0, 1, bad), std::invalid_argument);
}

TEST_CASE("measure_trace on a synthesized trace") {
  PowerModelParams params;
  const EnergyTrace trace = synthesize_trace(2.0, 2, params);
  const BenchRun run = measure_trace(trace, "probe");
  CHECK(run.label == "probe");
  CHECK(run.time_to_solution_s == 2.0);
  // 2 chips x 100 W x 2 s + host 150 W x 2 s
  CHECK(run.energy_to_solution_j == 700.0);
  CHECK(run.edp_js == 1400.0);
  CHECK(run.peak_power_w == 350.0);
}

TEST_CASE("constant-power exactness and the sleep-exclusion invariant") {
  // 100 W for a 2 s window: 200 J and an EDP of exactly 400 J*s.
  EnergyTrace trace;
  trace.window = {4.0, 6.0};
  trace.channels.push_back(
      make_power("chip", {0, 2, 4, 6, 8, 10}, {100, 100, 100, 100, 100, 100}));
  const BenchRun run = measure_trace(trace, "exact");
  CHECK(run.energy_to_solution_j == 200.0);
  CHECK(run.edp_js == 400.0);
  CHECK(run.peak_power_w == 100.0);

  // adding samples strictly outside the window changes nothing
  EnergyTrace padded = trace;
  padded.channels[0] = make_power(
      "chip", {0, 1, 2, 3, 3.5, 4, 6, 7, 8, 9, 10, 11, 12},
      {100, 100, 100, 100, 100, 100, 100, 100, 100, 100, 100, 100, 100});
  const BenchRun run2 = measure_trace(padded, "padded");
  CHECK(run2.energy_to_solution_j == run.energy_to_solution_j);
  CHECK(run2.edp_js == run.edp_js);
  CHECK(run2.peak_power_w == run.peak_power_w);

  // EDP = P*T^2 for constant total power
  CHECK(run.edp_js == 100.0 * 2.0 * 2.0);
}

TEST_CASE("measure_trace differentiates energy channels first") {
  EnergyTrace trace;
  trace.window = {1.0, 3.0};
  trace.channels.push_back(make_energy("host", {0, 1, 2, 3, 4}, {0, 50, 100, 150, 200}));
  const BenchRun run = measure_trace(trace);
  CHECK(run.time_to_solution_s == 2.0);
  CHECK(run.energy_to_solution_j == 100.0);  // 50 W for 2 s
  CHECK_THROWS_AS(measure_trace(EnergyTrace{}), std::invalid_argument);
}

TEST_CASE("trace file round trip is bit-exact") {
  Channel c = make_power("tt_card0", {0.0, 0.125, 2.0 / 3.0}, {15.0, 100.0, 0.1});
  const std::string text = serialize_channel(c);
  const Channel back = parse_channel(text);
  CHECK(back.name == c.name);
  CHECK(back.kind == c.kind);
  REQUIRE(back.t.size() == c.t.size());
  for (std::size_t k = 0; k < c.t.size(); ++k) {
    CHECK(std::memcmp(&back.t[k], &c.t[k], sizeof(double)) == 0);
    CHECK(std::memcmp(&back.v[k], &c.v[k], sizeof(double)) == 0);
  }

  Channel e = make_energy("host", {0.5, 1.5}, {10.0, 20.0});
  const Channel eback = parse_channel(serialize_channel(e));
  CHECK(eback.kind == ChannelKind::Energy);
}

TEST_CASE("trace parser diagnostics") {
  CHECK_NOTHROW(parse_channel("# channel=a kind=power unit=W\n0 1\n1 2\n"));
  // blank lines are tolerated; anything else after the header must be data
  CHECK_NOTHROW(parse_channel("# channel=a kind=power unit=W\n\n0 1\n"));
  CHECK_THROWS_WITH_AS(parse_channel("# channel=a kind=power unit=W\n# note\n"),
                       doctest::Contains("line 2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_channel(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_channel("0 1\n1 2\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_channel("# channel=a kind=magic unit=W\n0 1\n"),
                  std::invalid_argument);
  // unit must match the kind
  CHECK_THROWS_AS(parse_channel("# channel=a kind=power unit=J\n0 1\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_channel("# channel=a kind=energy unit=W\n0 1\n"),
                  std::invalid_argument);
  // malformed rows name the line
  CHECK_THROWS_WITH_AS(parse_channel("# channel=a kind=power unit=W\n0 1 2\n"),
                       doctest::Contains("line 2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_channel("# channel=a kind=power unit=W\n0 x\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_channel("# channel=a kind=power unit=W\n1 1\n0 2\n"),
                  std::invalid_argument);
}

TEST_CASE("bench_report aggregates run statistics") {
  std::vector<BenchRun> runs(3);
  runs[0].time_to_solution_s = 1.0;
  runs[1].time_to_solution_s = 2.0;
  runs[2].time_to_solution_s = 3.0;
  runs[0].energy_to_solution_j = 10.0;
  runs[1].energy_to_solution_j = 10.0;
  runs[2].energy_to_solution_j = 10.0;
  const BenchReport rep = bench_report(runs);
  CHECK(rep.time_s.mean == 2.0);
  CHECK(rep.time_s.stddev == 1.0);  // sample standard deviation
  CHECK(rep.energy_j.mean == 10.0);
  CHECK(rep.energy_j.stddev == 0.0);

  const BenchReport single = bench_report({runs[0]});
  CHECK(single.time_s.stddev == 0.0);
  CHECK_THROWS_AS(bench_report({}), std::invalid_argument);
}
