#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "spooky/quantum.hpp"
#include "spooky/timetag.hpp"

namespace spooky::sim {

struct SourceConfig {
  double pair_rate_hz = 5000.0;  // desk-scale default; the experiment ran 550 kHz
  double visibility = 0.913;
  double duration_s = 10.0;
  double sync_rate_hz = 5000.0;
  // Per-pair ground truth vectors grow with duration; off for long runs.
  bool record_pairs = false;
};

struct StationConfig {
  double optical_delay_s = 26.1e-6;     // source -> detector light path
  double electronic_delay_s = 3.0e-6;   // QRNG -> EOM ("D" exceeds "d")
  double setting_dwell_s = 1.0e-6;
  double detector_jitter_sigma_s = 148e-12;
  double efficiency = 0.1;
  double dark_rate_hz = 0.0;
  double tdc_resolution_ps = 1.0;
  double clock_offset_s = 0.0;
  double clock_drift_s_per_s = 0.0;
  // Analyzer angle per setting index.
  std::array<double, 2> basis_angles_rad{0.0, 0.0};
};

StationConfig default_station_a();
StationConfig default_station_b();

struct PairTruth {
  double emission_s = 0.0;
  std::uint8_t setting_a = 0, setting_b = 0;
  std::int8_t outcome_a = 0, outcome_b = 0;  // 0 = photon lost
};

struct GroundTruth {
  std::uint64_t pairs_emitted = 0;
  std::uint64_t pairs_coincident = 0;  // both photons detected
  std::uint64_t tags_a = 0, tags_b = 0;
  double clock_offset_b_s = 0.0;
  double clock_drift_b = 0.0;
  std::vector<PairTruth> pairs;  // populated only when record_pairs
};

struct RunOutput {
  std::vector<tag::TimeTagRecord> tags_a, tags_b;
  std::vector<tag::SyncPulseRecord> sync_a, sync_b;
  GroundTruth truth;
};

// Deterministic per-slot setting choice shared by the setting-stream view and
// the run generator: uniform on {0,1} from (seed, station, slot).
std::uint8_t setting_for_slot(std::uint64_t seed, tag::Station station,
                              std::uint64_t slot);

struct SettingSwitch {
  double switch_time_s = 0.0;
  std::uint8_t setting = 0;
};

// Materialized switch grid: one switch per dwell period over the duration.
std::vector<SettingSwitch> generate_setting_stream(const StationConfig& cfg,
                                                   double duration_s,
                                                   std::uint64_t seed,
                                                   tag::Station station);

// The setting in force at detector time t: chosen one electronic delay earlier.
std::uint8_t effective_setting(const StationConfig& cfg, double t_s,
                               std::uint64_t seed, tag::Station station);

// End-to-end run: Poissonian pair emissions, per-station loss, jitter, affine
// clock error, TDC quantization, dark counts, and 5 kHz-class sync pulses.
// Throws std::invalid_argument on inconsistent configuration.
RunOutput simulate_run(const SourceConfig& src, const StationConfig& a,
                       const StationConfig& b, std::uint64_t seed);

}  // namespace spooky::sim
