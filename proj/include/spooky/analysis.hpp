#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "spooky/quantum.hpp"
#include "spooky/relativity.hpp"
#include "spooky/timetag.hpp"

namespace spooky::analysis {

struct SyncFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ClockSolution {
  double offset_s = 0.0;        // B relative to A
  double drift_s_per_s = 0.0;
  double residual_rms_s = 0.0;

  // Map a B-local timestamp onto the A clock: (t_B - offset)/(1 + drift).
  double correct_b_ps(double t_b_ps) const {
    return (t_b_ps - offset_s * 1e12) / (1.0 + drift_s_per_s);
  }
};

// Associates pulses by index, then least-squares affine fit of B timestamps
// against A timestamps. Throws SyncFailure when fewer than two pulses
// associate or the residual exceeds the coarse bound.
ClockSolution synchronize_clocks(const std::vector<tag::SyncPulseRecord>& sync_a,
                                 const std::vector<tag::SyncPulseRecord>& sync_b,
                                 double coarse_offset_bound_s);

struct CoincidencePair {
  std::size_t index_a = 0, index_b = 0;
  double dt_ps = 0.0;  // corrected t_B' - t_A
  double time_a_ps = 0.0;
  std::uint8_t setting_a = 0, setting_b = 0;
  std::uint8_t channel_a = 0, channel_b = 0;
};

// Greedy earliest-first matching: A tags in time order, each tag used at most
// once, smallest |dt| within the window wins, ties toward the earlier B tag.
// O(n_A + n_B) amortized. Throws std::invalid_argument on unsorted input.
std::vector<CoincidencePair> find_coincidences(
    const std::vector<tag::TimeTagRecord>& tags_a,
    const std::vector<tag::TimeTagRecord>& tags_b, const ClockSolution& clock,
    double window_ps);

// Same greedy rule, O(n_A * n_B). Test oracle for the fast matcher.
std::vector<CoincidencePair> find_coincidences_bruteforce(
    const std::vector<tag::TimeTagRecord>& tags_a,
    const std::vector<tag::TimeTagRecord>& tags_b, const ClockSolution& clock,
    double window_ps);

struct CorrelationEstimate {
  std::uint8_t setting_a = 0, setting_b = 0;
  std::uint64_t n_pp = 0, n_pm = 0, n_mp = 0, n_mm = 0;
  double e_value = 0.0;
  double sigma_e = 0.0;
  bool valid = false;

  std::uint64_t total() const { return n_pp + n_pm + n_mp + n_mm; }
};

// Channel 0 -> +1, channel 1 -> -1; sigma_e = sqrt((1 - e^2)/N).
std::array<CorrelationEstimate, 4> estimate_correlations(
    const std::vector<CoincidencePair>& pairs);

struct IntervalResult {
  std::size_t interval_index = 0;
  double start_s = 0.0, end_s = 0.0;
  std::array<CorrelationEstimate, 4> correlations{};
  double s_value = 0.0;
  double sigma_s = 0.0;
  double violation_sigmas = 0.0;
  bool valid = false;  // false when any setting bin is empty
};

// Contiguous intervals of length T on the A clock; an overlapping variant
// yields n_points windows of length T spread evenly over the data span.
std::vector<IntervalResult> chsh_per_interval(
    const std::vector<CoincidencePair>& pairs, double interval_T_s,
    quantum::ChshCombination comb = quantum::ChshCombination::MinusOnApBp);

std::vector<IntervalResult> chsh_overlapping_intervals(
    const std::vector<CoincidencePair>& pairs, double interval_T_s,
    std::size_t n_points,
    quantum::ChshCombination comb = quantum::ChshCombination::MinusOnApBp);

struct BoundTimeline {
  // One entry per interval; nullopt where the interval did not violate.
  std::vector<std::optional<rel::SpeedBoundResult>> per_interval;
  std::optional<rel::SpeedBoundResult> summary;  // absent -> inconclusive
  bool all_intervals_violating = false;
};

BoundTimeline bound_timeline(const std::vector<IntervalResult>& intervals,
                             double rho, const rel::FrameVelocity& v,
                             double interval_T_s);

}  // namespace spooky::analysis
