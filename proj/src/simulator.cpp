#include "spooky/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spooky::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream_id) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream_id)));
}

std::int64_t stamp_ps(double true_time_s, const StationConfig& cfg) {
  const double local_s =
      true_time_s * (1.0 + cfg.clock_drift_s_per_s) + cfg.clock_offset_s;
  const double steps = local_s * 1e12 / cfg.tdc_resolution_ps;
  return static_cast<std::int64_t>(std::llround(steps) *
                                   static_cast<std::int64_t>(std::llround(cfg.tdc_resolution_ps)));
}

void validate(const SourceConfig& src, const StationConfig& st, const char* which) {
  std::string w(which);
  if (!(src.pair_rate_hz > 0.0)) throw std::invalid_argument("pair_rate_hz must be > 0");
  if (!(src.duration_s > 0.0)) throw std::invalid_argument("duration_s must be > 0");
  if (!(src.visibility >= 0.0 && src.visibility <= 1.0))
    throw std::invalid_argument("visibility must be in [0, 1]");
  if (!(src.sync_rate_hz > 0.0)) throw std::invalid_argument("sync_rate_hz must be > 0");
  if (!(st.setting_dwell_s > 0.0))
    throw std::invalid_argument(w + ": setting_dwell_s must be > 0");
  if (!(st.tdc_resolution_ps >= 1.0) ||
      st.tdc_resolution_ps != std::floor(st.tdc_resolution_ps))
    throw std::invalid_argument(w + ": tdc_resolution_ps must be a positive integer");
  if (st.setting_dwell_s * 1e12 < st.tdc_resolution_ps)
    throw std::invalid_argument(w + ": setting dwell below TDC resolution");
  if (!(st.efficiency >= 0.0 && st.efficiency <= 1.0))
    throw std::invalid_argument(w + ": efficiency must be in [0, 1]");
  if (st.optical_delay_s < 0.0 || st.electronic_delay_s < 0.0 ||
      st.dark_rate_hz < 0.0 || st.detector_jitter_sigma_s < 0.0)
    throw std::invalid_argument(w + ": negative delay/rate");
}

struct SortKey {
  bool operator()(const tag::TimeTagRecord& x, const tag::TimeTagRecord& y) const {
    if (x.timestamp_ps != y.timestamp_ps) return x.timestamp_ps < y.timestamp_ps;
    if (x.channel != y.channel) return x.channel < y.channel;
    return x.setting < y.setting;
  }
};

}  // namespace

StationConfig default_station_a() {
  StationConfig c;
  c.basis_angles_rad = {0.0, M_PI / 4.0};
  return c;
}

StationConfig default_station_b() {
  StationConfig c;
  c.basis_angles_rad = {M_PI / 8.0, -M_PI / 8.0};
  return c;
}

std::uint8_t setting_for_slot(std::uint64_t seed, tag::Station station,
                              std::uint64_t slot) {
  const std::uint64_t mixed = splitmix64(
      seed ^ splitmix64(slot * 2 + static_cast<std::uint64_t>(station) + 11));
  return static_cast<std::uint8_t>(mixed & 1);
}

std::vector<SettingSwitch> generate_setting_stream(const StationConfig& cfg,
                                                   double duration_s,
                                                   std::uint64_t seed,
                                                   tag::Station station) {
  if (!(cfg.setting_dwell_s > 0.0))
    throw std::invalid_argument("setting_dwell_s must be > 0");
  const auto n = static_cast<std::uint64_t>(duration_s / cfg.setting_dwell_s);
  std::vector<SettingSwitch> out;
  out.reserve(n);
  for (std::uint64_t k = 0; k < n; ++k)
    out.push_back({static_cast<double>(k) * cfg.setting_dwell_s,
                   setting_for_slot(seed, station, k)});
  return out;
}

std::uint8_t effective_setting(const StationConfig& cfg, double t_s,
                               std::uint64_t seed, tag::Station station) {
  const double choice_time = t_s - cfg.electronic_delay_s;
  const auto slot = choice_time <= 0.0
                        ? std::uint64_t{0}
                        : static_cast<std::uint64_t>(choice_time / cfg.setting_dwell_s);
  return setting_for_slot(seed, station, slot);
}

RunOutput simulate_run(const SourceConfig& src, const StationConfig& a,
                       const StationConfig& b, std::uint64_t seed) {
  validate(src, a, "station_a");
  validate(src, b, "station_b");

  RunOutput run;
  auto emission_rng = make_stream(seed, 1);
  auto outcome_rng = make_stream(seed, 2);
  auto jitter_rng_a = make_stream(seed, 3);
  auto jitter_rng_b = make_stream(seed, 4);
  auto dark_rng_a = make_stream(seed, 5);
  auto dark_rng_b = make_stream(seed, 6);

  std::exponential_distribution<double> gap(src.pair_rate_hz);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> jitter_a(0.0, a.detector_jitter_sigma_s);
  std::normal_distribution<double> jitter_b(0.0, b.detector_jitter_sigma_s);

  const quantum::NoisySingletState state{src.visibility};
  const double expected = src.pair_rate_hz * src.duration_s;
  run.tags_a.reserve(static_cast<std::size_t>(
      expected * a.efficiency + src.duration_s * a.dark_rate_hz + 1024));
  run.tags_b.reserve(static_cast<std::size_t>(
      expected * b.efficiency + src.duration_s * b.dark_rate_hz + 1024));
  if (src.record_pairs)
    run.truth.pairs.reserve(static_cast<std::size_t>(expected * 1.05));

  auto emit_tag = [&](std::vector<tag::TimeTagRecord>& tags,
                      const StationConfig& cfg, tag::Station station,
                      double arrival_s, int outcome,
                      std::normal_distribution<double>& jit,
                      std::mt19937_64& jit_rng) {
    const double detection = arrival_s + (cfg.detector_jitter_sigma_s > 0.0
                                              ? jit(jit_rng)
                                              : 0.0);
    tag::TimeTagRecord r;
    r.timestamp_ps = stamp_ps(detection, cfg);
    r.channel = outcome > 0 ? 0 : 1;
    r.setting = effective_setting(cfg, detection, seed, station);
    tags.push_back(r);
  };

  double t = gap(emission_rng);
  while (t < src.duration_s) {
    ++run.truth.pairs_emitted;
    const bool det_a = u01(outcome_rng) < a.efficiency;
    const bool det_b = u01(outcome_rng) < b.efficiency;
    if (det_a || det_b || src.record_pairs) {
      const double arrival_a = t + a.optical_delay_s;
      const double arrival_b = t + b.optical_delay_s;
      const std::uint8_t sa = effective_setting(a, arrival_a, seed, tag::Station::A);
      const std::uint8_t sb = effective_setting(b, arrival_b, seed, tag::Station::B);
      int oa = 0, ob = 0;
      if (det_a && det_b) {
        const auto pair = quantum::sample_outcome(state, {a.basis_angles_rad[sa]},
                                                  {b.basis_angles_rad[sb]},
                                                  outcome_rng);
        oa = pair.outcome_a;
        ob = pair.outcome_b;
        ++run.truth.pairs_coincident;
      } else if (det_a) {
        oa = u01(outcome_rng) < 0.5 ? +1 : -1;
      } else if (det_b) {
        ob = u01(outcome_rng) < 0.5 ? +1 : -1;
      }
      if (det_a) emit_tag(run.tags_a, a, tag::Station::A, arrival_a, oa, jitter_a, jitter_rng_a);
      if (det_b) emit_tag(run.tags_b, b, tag::Station::B, arrival_b, ob, jitter_b, jitter_rng_b);
      if (src.record_pairs) {
        PairTruth pt;
        pt.emission_s = t;
        pt.setting_a = sa;
        pt.setting_b = sb;
        pt.outcome_a = static_cast<std::int8_t>(det_a ? oa : 0);
        pt.outcome_b = static_cast<std::int8_t>(det_b ? ob : 0);
        run.truth.pairs.push_back(pt);
      }
    }
    t += gap(emission_rng);
  }

  // Uncorrelated background, uniform in time and over channels.
  auto add_dark = [&](std::vector<tag::TimeTagRecord>& tags, const StationConfig& cfg,
                      tag::Station station, std::mt19937_64& rng) {
    if (cfg.dark_rate_hz <= 0.0) return;
    std::exponential_distribution<double> dgap(cfg.dark_rate_hz);
    std::uniform_int_distribution<int> coin(0, 1);
    double td = dgap(rng);
    while (td < src.duration_s) {
      tag::TimeTagRecord r;
      r.timestamp_ps = stamp_ps(td, cfg);
      r.channel = static_cast<std::uint8_t>(coin(rng));
      r.setting = effective_setting(cfg, td, seed, station);
      tags.push_back(r);
      td += dgap(rng);
    }
  };
  add_dark(run.tags_a, a, tag::Station::A, dark_rng_a);
  add_dark(run.tags_b, b, tag::Station::B, dark_rng_b);

  // Sync pulses at exactly sync_rate in true time, stamped through each clock.
  const auto n_pulses =
      static_cast<std::uint64_t>(src.duration_s * src.sync_rate_hz);
  run.sync_a.reserve(n_pulses);
  run.sync_b.reserve(n_pulses);
  for (std::uint64_t k = 0; k < n_pulses; ++k) {
    const double tk = static_cast<double>(k) / src.sync_rate_hz;
    run.sync_a.push_back({stamp_ps(tk + a.optical_delay_s, a),
                          static_cast<std::uint32_t>(k)});
    run.sync_b.push_back({stamp_ps(tk + b.optical_delay_s, b),
                          static_cast<std::uint32_t>(k)});
  }

  std::sort(run.tags_a.begin(), run.tags_a.end(), SortKey{});
  std::sort(run.tags_b.begin(), run.tags_b.end(), SortKey{});

  run.truth.tags_a = run.tags_a.size();
  run.truth.tags_b = run.tags_b.size();
  run.truth.clock_offset_b_s = b.clock_offset_s - a.clock_offset_s;
  run.truth.clock_drift_b = b.clock_drift_s_per_s - a.clock_drift_s_per_s;
  return run;
}

}  // namespace spooky::sim
