#include "spooky/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace spooky::analysis {

ClockSolution synchronize_clocks(const std::vector<tag::SyncPulseRecord>& sync_a,
                                 const std::vector<tag::SyncPulseRecord>& sync_b,
                                 double coarse_offset_bound_s) {
  if (sync_a.size() < 2 || sync_b.size() < 2)
    throw SyncFailure("synchronize_clocks: need at least 2 pulses per stream");

  std::map<std::uint32_t, std::int64_t> by_index;
  for (const auto& p : sync_a) by_index[p.pulse_index] = p.timestamp_ps;

  const double bound_ps = coarse_offset_bound_s * 1e12;
  std::vector<std::pair<std::int64_t, double>> assoc;  // (t_A, t_B - t_A)
  assoc.reserve(sync_b.size());
  for (const auto& p : sync_b) {
    auto it = by_index.find(p.pulse_index);
    if (it == by_index.end()) continue;
    const double d = static_cast<double>(p.timestamp_ps - it->second);
    if (std::abs(d) <= bound_ps) assoc.emplace_back(it->second, d);
  }
  if (assoc.size() < 2)
    throw SyncFailure("synchronize_clocks: no consistent pulse association");

  // Fit d = offset_ps + drift * t_A, centered for conditioning.
  long double sum_x = 0.0L, sum_d = 0.0L;
  for (const auto& [x, d] : assoc) {
    sum_x += static_cast<long double>(x);
    sum_d += d;
  }
  const long double n = static_cast<long double>(assoc.size());
  const long double mean_x = sum_x / n;
  const long double mean_d = sum_d / n;

  long double sxx = 0.0L, sxd = 0.0L;
  for (const auto& [x, d] : assoc) {
    const long double cx = static_cast<long double>(x) - mean_x;
    sxx += cx * cx;
    sxd += cx * (static_cast<long double>(d) - mean_d);
  }

  ClockSolution sol;
  const long double slope = sxx > 0.0L ? sxd / sxx : 0.0L;
  sol.drift_s_per_s = static_cast<double>(slope);
  sol.offset_s = static_cast<double>((mean_d - slope * mean_x)) * 1e-12;

  long double ss = 0.0L;
  for (const auto& [x, d] : assoc) {
    const long double r = static_cast<long double>(d) - mean_d -
                          slope * (static_cast<long double>(x) - mean_x);
    ss += r * r;
  }
  sol.residual_rms_s = static_cast<double>(std::sqrt(static_cast<double>(ss / n))) * 1e-12;
  return sol;
}

namespace {

void check_sorted(const std::vector<tag::TimeTagRecord>& tags, const char* name) {
  for (std::size_t i = 1; i < tags.size(); ++i)
    if (tags[i].timestamp_ps < tags[i - 1].timestamp_ps)
      throw std::invalid_argument(std::string("find_coincidences: ") + name +
                                  " not sorted");
}

CoincidencePair make_pair(const std::vector<tag::TimeTagRecord>& tags_a,
                          const std::vector<tag::TimeTagRecord>& tags_b,
                          std::size_t i, std::size_t j, double dt,
                          double time_a) {
  CoincidencePair p;
  p.index_a = i;
  p.index_b = j;
  p.dt_ps = dt;
  p.time_a_ps = time_a;
  p.setting_a = tags_a[i].setting;
  p.setting_b = tags_b[j].setting;
  p.channel_a = tags_a[i].channel;
  p.channel_b = tags_b[j].channel;
  return p;
}

}  // namespace

std::vector<CoincidencePair> find_coincidences(
    const std::vector<tag::TimeTagRecord>& tags_a,
    const std::vector<tag::TimeTagRecord>& tags_b, const ClockSolution& clock,
    double window_ps) {
  if (!(window_ps > 0.0))
    throw std::invalid_argument("find_coincidences: window must be > 0");
  check_sorted(tags_a, "tags_a");
  check_sorted(tags_b, "tags_b");

  std::vector<double> b_corr(tags_b.size());
  for (std::size_t j = 0; j < tags_b.size(); ++j)
    b_corr[j] = clock.correct_b_ps(static_cast<double>(tags_b[j].timestamp_ps));

  std::vector<CoincidencePair> out;
  std::vector<char> used(tags_b.size(), 0);
  std::size_t lo = 0;
  for (std::size_t i = 0; i < tags_a.size(); ++i) {
    const double ta = static_cast<double>(tags_a[i].timestamp_ps);
    while (lo < tags_b.size() && (used[lo] || b_corr[lo] < ta - window_ps)) ++lo;
    std::size_t best = tags_b.size();
    double best_adt = 0.0;
    for (std::size_t j = lo; j < tags_b.size() && b_corr[j] <= ta + window_ps; ++j) {
      if (used[j]) continue;
      const double adt = std::abs(b_corr[j] - ta);
      if (best == tags_b.size() || adt < best_adt) {
        best = j;
        best_adt = adt;
      }
    }
    if (best != tags_b.size()) {
      used[best] = 1;
      out.push_back(make_pair(tags_a, tags_b, i, best, b_corr[best] - ta, ta));
    }
  }
  return out;
}

std::vector<CoincidencePair> find_coincidences_bruteforce(
    const std::vector<tag::TimeTagRecord>& tags_a,
    const std::vector<tag::TimeTagRecord>& tags_b, const ClockSolution& clock,
    double window_ps) {
  check_sorted(tags_a, "tags_a");
  check_sorted(tags_b, "tags_b");
  std::vector<double> b_corr(tags_b.size());
  for (std::size_t j = 0; j < tags_b.size(); ++j)
    b_corr[j] = clock.correct_b_ps(static_cast<double>(tags_b[j].timestamp_ps));

  std::vector<CoincidencePair> out;
  std::vector<char> used(tags_b.size(), 0);
  for (std::size_t i = 0; i < tags_a.size(); ++i) {
    const double ta = static_cast<double>(tags_a[i].timestamp_ps);
    std::size_t best = tags_b.size();
    double best_adt = 0.0;
    for (std::size_t j = 0; j < tags_b.size(); ++j) {
      if (used[j]) continue;
      const double adt = std::abs(b_corr[j] - ta);
      if (adt > window_ps) continue;
      if (best == tags_b.size() || adt < best_adt) {
        best = j;
        best_adt = adt;
      }
    }
    if (best != tags_b.size()) {
      used[best] = 1;
      out.push_back(make_pair(tags_a, tags_b, i, best, b_corr[best] - ta, ta));
    }
  }
  return out;
}

std::array<CorrelationEstimate, 4> estimate_correlations(
    const std::vector<CoincidencePair>& pairs) {
  std::array<CorrelationEstimate, 4> est{};
  for (int sa = 0; sa < 2; ++sa)
    for (int sb = 0; sb < 2; ++sb) {
      est[sa * 2 + sb].setting_a = static_cast<std::uint8_t>(sa);
      est[sa * 2 + sb].setting_b = static_cast<std::uint8_t>(sb);
    }
  for (const auto& p : pairs) {
    auto& e = est[p.setting_a * 2 + p.setting_b];
    const bool a_plus = p.channel_a == 0;
    const bool b_plus = p.channel_b == 0;
    if (a_plus && b_plus) ++e.n_pp;
    else if (a_plus) ++e.n_pm;
    else if (b_plus) ++e.n_mp;
    else ++e.n_mm;
  }
  for (auto& e : est) {
    const auto n = e.total();
    if (n == 0) continue;
    e.e_value = (static_cast<double>(e.n_pp) + static_cast<double>(e.n_mm) -
                 static_cast<double>(e.n_pm) - static_cast<double>(e.n_mp)) /
                static_cast<double>(n);
    e.sigma_e = std::sqrt((1.0 - e.e_value * e.e_value) / static_cast<double>(n));
    e.valid = true;
  }
  return est;
}

namespace {

IntervalResult finish_interval(std::size_t index, double start_s, double end_s,
                               const std::vector<CoincidencePair>& pairs,
                               quantum::ChshCombination comb) {
  IntervalResult r;
  r.interval_index = index;
  r.start_s = start_s;
  r.end_s = end_s;
  r.correlations = estimate_correlations(pairs);
  r.valid = true;
  for (const auto& e : r.correlations) r.valid = r.valid && e.valid;
  if (r.valid) {
    const auto& c = r.correlations;
    // index = setting_a*2 + setting_b: (a,b), (a,b'), (a',b), (a',b')
    r.s_value = quantum::chsh_value(c[0].e_value, c[2].e_value, c[1].e_value,
                                    c[3].e_value, comb);
    double var = 0.0;
    for (const auto& e : c) var += e.sigma_e * e.sigma_e;
    r.sigma_s = std::sqrt(var);
    r.violation_sigmas = r.sigma_s > 0.0 ? (r.s_value - 2.0) / r.sigma_s : 0.0;
  }
  return r;
}

}  // namespace

std::vector<IntervalResult> chsh_per_interval(
    const std::vector<CoincidencePair>& pairs, double interval_T_s,
    quantum::ChshCombination comb) {
  if (!(interval_T_s > 0.0))
    throw std::invalid_argument("chsh_per_interval: T must be > 0");
  std::vector<IntervalResult> out;
  if (pairs.empty()) return out;
  const double t_ps = interval_T_s * 1e12;
  const auto last_index =
      static_cast<std::size_t>(pairs.back().time_a_ps / t_ps);

  std::size_t cursor = 0;
  for (std::size_t k = 0; k <= last_index; ++k) {
    std::vector<CoincidencePair> bucket;
    const double hi = static_cast<double>(k + 1) * t_ps;
    while (cursor < pairs.size() && pairs[cursor].time_a_ps < hi)
      bucket.push_back(pairs[cursor++]);
    out.push_back(finish_interval(k, static_cast<double>(k) * interval_T_s,
                                  static_cast<double>(k + 1) * interval_T_s,
                                  bucket, comb));
  }
  return out;
}

std::vector<IntervalResult> chsh_overlapping_intervals(
    const std::vector<CoincidencePair>& pairs, double interval_T_s,
    std::size_t n_points, quantum::ChshCombination comb) {
  if (!(interval_T_s > 0.0) || n_points < 2)
    throw std::invalid_argument("chsh_overlapping_intervals: bad arguments");
  std::vector<IntervalResult> out;
  if (pairs.empty()) return out;
  const double span_s = pairs.back().time_a_ps * 1e-12;
  const double step =
      std::max(0.0, (span_s - interval_T_s) / static_cast<double>(n_points - 1));
  for (std::size_t k = 0; k < n_points; ++k) {
    const double start = static_cast<double>(k) * step;
    const double lo_ps = start * 1e12;
    const double hi_ps = (start + interval_T_s) * 1e12;
    auto first = std::lower_bound(
        pairs.begin(), pairs.end(), lo_ps,
        [](const CoincidencePair& p, double v) { return p.time_a_ps < v; });
    std::vector<CoincidencePair> bucket;
    for (auto it = first; it != pairs.end() && it->time_a_ps < hi_ps; ++it)
      bucket.push_back(*it);
    out.push_back(finish_interval(k, start, start + interval_T_s, bucket, comb));
  }
  return out;
}

BoundTimeline bound_timeline(const std::vector<IntervalResult>& intervals,
                             double rho, const rel::FrameVelocity& v,
                             double interval_T_s) {
  BoundTimeline tl;
  tl.per_interval.reserve(intervals.size());
  bool any = false, all = !intervals.empty();
  for (const auto& iv : intervals) {
    if (iv.valid && iv.violation_sigmas > 0.0) {
      tl.per_interval.push_back(rel::speed_bound_optimal(rho, v, interval_T_s));
      any = true;
    } else {
      tl.per_interval.push_back(std::nullopt);
      all = false;
    }
  }
  tl.all_intervals_violating = all;
  if (any) tl.summary = rel::speed_bound_optimal(rho, v, interval_T_s);
  return tl;
}

}  // namespace spooky::analysis
