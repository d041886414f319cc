#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "spooky/analysis.hpp"
#include "spooky/simulator.hpp"

using namespace spooky::analysis;
using spooky::tag::SyncPulseRecord;
using spooky::tag::TimeTagRecord;

TEST_CASE("clock synchronization") {
  SUBCASE("identical streams give zero offset and drift") {
    std::vector<SyncPulseRecord> s;
    for (std::uint32_t i = 0; i < 100; ++i)
      s.push_back({std::int64_t(i) * 200000000, i});
    const auto sol = synchronize_clocks(s, s, 1e-3);
    CHECK(sol.offset_s == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(sol.drift_s_per_s == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(sol.residual_rms_s == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("recovers an injected offset and drift from a simulated 100 s run") {
    spooky::sim::SourceConfig src;
    src.pair_rate_hz = 1000.0;
    src.duration_s = 100.0;
    src.sync_rate_hz = 1000.0;
    auto a = spooky::sim::default_station_a();
    auto b = spooky::sim::default_station_b();
    b.clock_offset_s = 1e-6;
    b.clock_drift_s_per_s = 1e-9;
    const auto run = spooky::sim::simulate_run(src, a, b, 321);
    const auto sol = synchronize_clocks(run.sync_a, run.sync_b, 1e-3);
    CHECK(std::abs(sol.offset_s - 1e-6) < 1e-12);  // one TDC step
    CHECK(std::abs(sol.drift_s_per_s - 1e-9) < 1e-11);
  }
  SUBCASE("failure paths") {
    std::vector<SyncPulseRecord> a, b;
    for (std::uint32_t i = 0; i < 10; ++i) {
      a.push_back({std::int64_t(i) * 1000000, i});
      b.push_back({std::int64_t(i) * 1000000, i + 1000});  // disjoint indices
    }
    CHECK_THROWS_AS(synchronize_clocks(a, b, 1e-3), SyncFailure);
    CHECK_THROWS_AS(synchronize_clocks({a[0]}, b, 1e-3), SyncFailure);
  }
}

namespace {

std::vector<TimeTagRecord> single_tag(std::int64_t ts) {
  return {{ts, 0, 0}};
}

std::vector<TimeTagRecord> random_tags(std::mt19937_64& rng, std::size_t n,
                                       std::int64_t span_ps) {
  std::uniform_int_distribution<std::int64_t> ts(0, span_ps);
  std::uniform_int_distribution<int> bit(0, 1);
  std::vector<TimeTagRecord> tags(n);
  for (auto& t : tags)
    t = {ts(rng), std::uint8_t(bit(rng)), std::uint8_t(bit(rng))};
  std::sort(tags.begin(), tags.end(),
            [](const TimeTagRecord& x, const TimeTagRecord& y) {
              return x.timestamp_ps < y.timestamp_ps;
            });
  return tags;
}

bool same_pairs(const std::vector<CoincidencePair>& x,
                const std::vector<CoincidencePair>& y) {
  if (x.size() != y.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i].index_a != y[i].index_a || x[i].index_b != y[i].index_b)
      return false;
  return true;
}

}  // namespace

TEST_CASE("coincidence windowing basics") {
  const ClockSolution id{};
  CHECK(find_coincidences(single_tag(0), single_tag(1000), id, 3000.0).size() == 1);
  CHECK(find_coincidences(single_tag(0), single_tag(5000), id, 3000.0).empty());
  CHECK_THROWS_AS(find_coincidences({{10, 0, 0}, {5, 0, 0}}, {}, id, 3000.0),
                  std::invalid_argument);
}

TEST_CASE("greedy matcher prefers the closest unused partner") {
  const ClockSolution id{};
  std::vector<TimeTagRecord> a{{1000, 0, 0}, {1800, 0, 0}};
  std::vector<TimeTagRecord> b{{900, 0, 0}, {1900, 0, 0}};
  const auto pairs = find_coincidences(a, b, id, 3000.0);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].index_b == 0);  // |dt|=100 beats |dt|=900
  CHECK(pairs[1].index_b == 1);
  // Tie goes to the earlier B tag.
  std::vector<TimeTagRecord> b2{{500, 0, 0}, {1500, 0, 0}};
  const auto tied = find_coincidences({{1000, 0, 0}}, b2, id, 3000.0);
  REQUIRE(tied.size() == 1);
  CHECK(tied[0].index_b == 0);
}

TEST_CASE("property: fast matcher equals the brute-force oracle") {
  std::mt19937_64 rng(314159);
  const ClockSolution id{};
  for (int i = 0; i < 30; ++i) {
    std::uniform_int_distribution<std::size_t> sz(0, 2000);
    const auto a = random_tags(rng, sz(rng), 2000000);
    const auto b = random_tags(rng, sz(rng), 2000000);
    const auto fast = find_coincidences(a, b, id, 3000.0);
    const auto brute = find_coincidences_bruteforce(a, b, id, 3000.0);
    REQUIRE(same_pairs(fast, brute));
    // No tag is used twice.
    std::set<std::size_t> ia, ib;
    for (const auto& p : fast) {
      CHECK(ia.insert(p.index_a).second);
      CHECK(ib.insert(p.index_b).second);
    }
  }
}

TEST_CASE("correlation estimation") {
  SUBCASE("all (+,-) pairs give e = -1") {
    std::vector<CoincidencePair> pairs(100);
    for (auto& p : pairs) {
      p.setting_a = 1;
      p.setting_b = 0;
      p.channel_a = 0;
      p.channel_b = 1;
    }
    const auto est = estimate_correlations(pairs);
    const auto& e = est[2];  // (sa=1, sb=0)
    REQUIRE(e.valid);
    CHECK(e.e_value == doctest::Approx(-1.0));
    CHECK(e.n_pm == 100);
    CHECK(!est[0].valid);  // untouched bin flagged invalid
  }
  SUBCASE("synthetic draws land within 4 sigma of E = -0.6456") {
    std::mt19937_64 rng(8);
    const double e_true = -0.913 * std::cos(M_PI / 4.0);
    std::vector<CoincidencePair> pairs;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      CoincidencePair p;
      const int prod = u(rng) < 0.5 * (1.0 + e_true) ? +1 : -1;
      const int a = u(rng) < 0.5 ? +1 : -1;
      p.channel_a = a > 0 ? 0 : 1;
      p.channel_b = prod * a > 0 ? 0 : 1;
      pairs.push_back(p);
    }
    const auto est = estimate_correlations(pairs);
    REQUIRE(est[0].valid);
    CHECK(std::abs(est[0].e_value - e_true) < 4.0 * est[0].sigma_e);
  }
}

TEST_CASE("statistical soundness: 2-sigma coverage over 100 simulations") {
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double e_true = -0.6456;
  int covered = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<CoincidencePair> pairs;
    for (int i = 0; i < 2000; ++i) {
      CoincidencePair p;
      const int prod = u(rng) < 0.5 * (1.0 + e_true) ? +1 : -1;
      const int a = u(rng) < 0.5 ? +1 : -1;
      p.channel_a = a > 0 ? 0 : 1;
      p.channel_b = prod * a > 0 ? 0 : 1;
      pairs.push_back(p);
    }
    const auto est = estimate_correlations(pairs);
    if (std::abs(est[0].e_value - e_true) <= 2.0 * est[0].sigma_e) ++covered;
  }
  CHECK(covered >= 93);
}

TEST_CASE("per-interval CHSH on a simulated run") {
  spooky::sim::SourceConfig src;
  src.pair_rate_hz = 20000.0;
  src.visibility = 0.913;
  src.duration_s = 60.0;
  src.sync_rate_hz = 1000.0;
  auto a = spooky::sim::default_station_a();
  auto b = spooky::sim::default_station_b();
  a.efficiency = b.efficiency = 0.5;
  b.clock_offset_s = 1e-6;

  const auto run = spooky::sim::simulate_run(src, a, b, 606);
  const auto clock = synchronize_clocks(run.sync_a, run.sync_b, 1e-3);
  const auto pairs = find_coincidences(run.tags_a, run.tags_b, clock, 3000.0);
  REQUIRE(pairs.size() > 10000);

  // Post-correction pair time differences center at zero.
  double mean_dt = 0.0;
  for (const auto& p : pairs) mean_dt += p.dt_ps;
  mean_dt /= double(pairs.size());
  CHECK(std::abs(mean_dt) < 10.0);

  const auto intervals = chsh_per_interval(pairs, 10.0);
  REQUIRE(intervals.size() == 6);
  const double s_expected = 0.913 * 2.0 * std::sqrt(2.0);
  for (const auto& iv : intervals) {
    REQUIRE(iv.valid);
    CHECK(iv.s_value > 2.0);
    CHECK(std::abs(iv.s_value - s_expected) < 4.0 * iv.sigma_s);
    CHECK(iv.violation_sigmas > 1.0);
  }

  const auto overlapped = chsh_overlapping_intervals(pairs, 10.0, 8);
  CHECK(overlapped.size() == 8);
  for (const auto& iv : overlapped) CHECK(iv.s_value > 2.0);

  SUBCASE("bound timeline with every interval violating") {
    const auto tl = bound_timeline(intervals, 6.84e-6, {1e-3, M_PI / 2.0, 0.0},
                                   1800.0);
    REQUIRE(tl.summary.has_value());
    CHECK(tl.all_intervals_violating);
    CHECK(tl.summary->bound_over_c == doctest::Approx(1.38e4).epsilon(0.01));
    for (const auto& r : tl.per_interval) {
      REQUIRE(r.has_value());
      CHECK(r->bound_over_c == doctest::Approx(tl.summary->bound_over_c));
    }
  }
}

TEST_CASE("low visibility yields no systematic violation and no bound") {
  spooky::sim::SourceConfig src;
  src.pair_rate_hz = 20000.0;
  src.visibility = 0.5;
  src.duration_s = 30.0;
  src.sync_rate_hz = 1000.0;
  auto a = spooky::sim::default_station_a();
  auto b = spooky::sim::default_station_b();
  a.efficiency = b.efficiency = 0.5;

  const auto run = spooky::sim::simulate_run(src, a, b, 70707);
  const auto pairs = find_coincidences(run.tags_a, run.tags_b, {}, 3000.0);
  const auto intervals = chsh_per_interval(pairs, 30.0);
  REQUIRE(intervals.size() == 1);
  const double s_expected = 0.5 * 2.0 * std::sqrt(2.0);
  CHECK(std::abs(intervals[0].s_value - s_expected) < 3.0 * intervals[0].sigma_s);
  CHECK(intervals[0].s_value < 2.0);

  const auto tl = bound_timeline(intervals, 6.84e-6, {1e-3, M_PI / 2.0, 0.0},
                                 1800.0);
  CHECK(!tl.summary.has_value());
  CHECK(!tl.all_intervals_violating);
}

TEST_CASE("empty bins invalidate the interval") {
  std::vector<CoincidencePair> pairs(10);
  for (auto& p : pairs) {
    p.setting_a = 0;
    p.setting_b = 0;
    p.time_a_ps = 1e9;
  }
  const auto intervals = chsh_per_interval(pairs, 1.0);
  REQUIRE(intervals.size() == 1);
  CHECK(!intervals[0].valid);
  const auto tl = bound_timeline(intervals, 6.84e-6, {1e-3, M_PI / 2.0, 0.0},
                                 1800.0);
  CHECK(!tl.summary.has_value());
}
