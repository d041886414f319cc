// Command-line surface: simulate two-station Bell-test tag streams, analyze
// them into per-interval CHSH values, evaluate influence-speed bounds, sweep
// the (beta, theta) surface, and verify space-like separation of the key
// events.

#include <CLI11.hpp>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "spooky/analysis.hpp"
#include "spooky/config.hpp"
#include "spooky/constants.hpp"
#include "spooky/geo.hpp"
#include "spooky/quantum.hpp"
#include "spooky/relativity.hpp"
#include "spooky/simulator.hpp"
#include "spooky/timetag.hpp"

namespace fs = std::filesystem;
using spooky::config::Config;

namespace {

// Documented exit statuses.
constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kValidationError = 2;
constexpr int kParseError = 3;
constexpr int kSyncFailure = 4;
constexpr int kInconclusive = 5;

std::string provenance(const Config& cfg, std::uint64_t seed) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "# config_hash=%016" PRIx64 " seed=%" PRIu64,
                cfg.content_hash(), seed);
  return buf;
}

// Write-then-rename so readers never see a partial file.
void atomic_write(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::trunc | std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << content;
  }
  fs::rename(tmp, path);
}

spooky::sim::SourceConfig source_from(const Config& c) {
  spooky::sim::SourceConfig s;
  s.pair_rate_hz = c.get_double("source", "pair_rate_hz", s.pair_rate_hz);
  s.visibility = c.get_double("source", "visibility", s.visibility);
  s.duration_s = c.get_double("source", "duration_s", s.duration_s);
  s.sync_rate_hz = c.get_double("source", "sync_rate_hz", s.sync_rate_hz);
  s.record_pairs = c.get_int("source", "record_pairs", 0) != 0;
  return s;
}

spooky::sim::StationConfig station_from(const Config& c, const std::string& sec,
                                        spooky::sim::StationConfig st) {
  st.optical_delay_s = c.get_double(sec, "optical_delay_s", st.optical_delay_s);
  st.electronic_delay_s = c.get_double(sec, "electronic_delay_s", st.electronic_delay_s);
  st.setting_dwell_s = c.get_double(sec, "setting_dwell_s", st.setting_dwell_s);
  st.detector_jitter_sigma_s =
      c.get_double(sec, "detector_jitter_sigma_s", st.detector_jitter_sigma_s);
  st.efficiency = c.get_double(sec, "efficiency", st.efficiency);
  st.dark_rate_hz = c.get_double(sec, "dark_rate_hz", st.dark_rate_hz);
  st.tdc_resolution_ps = c.get_double(sec, "tdc_resolution_ps", st.tdc_resolution_ps);
  st.clock_offset_s = c.get_double(sec, "clock_offset_s", st.clock_offset_s);
  st.clock_drift_s_per_s =
      c.get_double(sec, "clock_drift_s_per_s", st.clock_drift_s_per_s);
  st.basis_angles_rad[0] = c.get_double(sec, "basis_angle_0_rad", st.basis_angles_rad[0]);
  st.basis_angles_rad[1] = c.get_double(sec, "basis_angle_1_rad", st.basis_angles_rad[1]);
  return st;
}

std::vector<double> grid_from(const Config& c, const std::string& sec,
                              const std::string& axis, double dmin, double dmax,
                              int dn) {
  if (c.has(sec, axis + "_list")) return c.get_list(sec, axis + "_list");
  const double lo = c.get_double(sec, axis + "_min", dmin);
  const double hi = c.get_double(sec, axis + "_max", dmax);
  const auto n = static_cast<int>(c.get_int(sec, axis + "_n", dn));
  if (n < 1 || hi < lo)
    throw spooky::config::ConfigError("bad grid for [" + sec + "] " + axis);
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i)
    g[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return g;
}

spooky::rel::SpacetimeEvent event_from(const Config& c, const std::string& key) {
  if (!c.has("verify", key))
    throw spooky::config::ConfigError("missing [verify] " + key +
                                      " (expected x_m,y_m,z_m,t_s)");
  const auto v = c.get_list("verify", key);
  if (v.size() != 4)
    throw spooky::config::ConfigError("[verify] " + key +
                                      " needs 4 values: x_m,y_m,z_m,t_s");
  return {{v[0], v[1], v[2]}, v[3], "earth"};
}

int cmd_simulate(const Config& cfg, std::uint64_t seed, const fs::path& out) {
  const auto src = source_from(cfg);
  const auto sta = station_from(cfg, "station_a", spooky::sim::default_station_a());
  const auto stb = station_from(cfg, "station_b", spooky::sim::default_station_b());
  fs::create_directories(out);

  const auto run = spooky::sim::simulate_run(src, sta, stb, seed);
  spooky::tag::write_tags((out / "tags_a.qtt").string(), spooky::tag::Station::A,
                          run.tags_a);
  spooky::tag::write_tags((out / "tags_b.qtt").string(), spooky::tag::Station::B,
                          run.tags_b);
  spooky::tag::write_sync((out / "sync_a.qsp").string(), spooky::tag::Station::A,
                          run.sync_a);
  spooky::tag::write_sync((out / "sync_b.qsp").string(), spooky::tag::Station::B,
                          run.sync_b);

  std::ostringstream gt;
  gt << provenance(cfg, seed) << "\n"
     << "key,value\n"
     << "pairs_emitted," << run.truth.pairs_emitted << "\n"
     << "pairs_coincident," << run.truth.pairs_coincident << "\n"
     << "tags_a," << run.truth.tags_a << "\n"
     << "tags_b," << run.truth.tags_b << "\n";
  char num[64];
  std::snprintf(num, sizeof num, "%.17g", run.truth.clock_offset_b_s);
  gt << "clock_offset_b_s," << num << "\n";
  std::snprintf(num, sizeof num, "%.17g", run.truth.clock_drift_b);
  gt << "clock_drift_b," << num << "\n";
  atomic_write(out / "ground_truth.csv", gt.str());

  std::cout << "simulate: " << run.truth.tags_a << " tags at A, "
            << run.truth.tags_b << " at B, " << run.sync_a.size()
            << " sync pulses -> " << out.string() << "\n";
  return kOk;
}

int cmd_analyze(const Config& cfg, std::uint64_t seed, const fs::path& in,
                const fs::path& out) {
  const double window_ps = cfg.get_double("analysis", "window_ps", 3000.0);
  const double interval_T_s = cfg.get_double("analysis", "interval_T_s", 1800.0);
  const double coarse_bound_s =
      cfg.get_double("analysis", "coarse_offset_bound_s", 1e-3);
  const auto overlap_points =
      static_cast<std::size_t>(cfg.get_int("analysis", "overlapping_points", 0));
  const double rho = cfg.get_double("bound", "rho", 6.84e-6);
  const double beta = cfg.get_double("bound", "beta", 1e-3);
  const double theta = cfg.get_double("bound", "theta_rad", M_PI / 2.0);

  const auto tags_a = spooky::tag::read_tags_any(
      cfg.get_str("analysis", "tags_a", (in / "tags_a.qtt").string()));
  const auto tags_b = spooky::tag::read_tags_any(
      cfg.get_str("analysis", "tags_b", (in / "tags_b.qtt").string()));
  const auto sync_a = spooky::tag::read_sync(
      cfg.get_str("analysis", "sync_a", (in / "sync_a.qsp").string()));
  const auto sync_b = spooky::tag::read_sync(
      cfg.get_str("analysis", "sync_b", (in / "sync_b.qsp").string()));

  const auto clock =
      spooky::analysis::synchronize_clocks(sync_a, sync_b, coarse_bound_s);
  std::cout << "sync: offset=" << clock.offset_s << " s drift=" << clock.drift_s_per_s
            << " residual_rms=" << clock.residual_rms_s << " s\n";

  const auto pairs =
      spooky::analysis::find_coincidences(tags_a, tags_b, clock, window_ps);
  std::cout << "coincidences: " << pairs.size() << "\n";

  const auto intervals =
      overlap_points >= 2
          ? spooky::analysis::chsh_overlapping_intervals(pairs, interval_T_s,
                                                         overlap_points)
          : spooky::analysis::chsh_per_interval(pairs, interval_T_s);
  const auto timeline = spooky::analysis::bound_timeline(
      intervals, rho, {beta, theta, 0.0}, interval_T_s);

  std::ostringstream csv;
  csv << provenance(cfg, seed) << "\n"
      << "interval_index,start_s,S,sigma_S,violation_sigmas,bound_over_c\n";
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const auto& iv = intervals[i];
    char line[256];
    std::snprintf(line, sizeof line, "%zu,%.6f,%.9g,%.9g,%.9g,", iv.interval_index,
                  iv.start_s, iv.s_value, iv.sigma_s, iv.violation_sigmas);
    csv << line;
    if (timeline.per_interval[i])
      csv << timeline.per_interval[i]->bound_over_c;
    csv << "\n";
  }
  fs::create_directories(out);
  atomic_write(out / "intervals.csv", csv.str());

  std::size_t violating = 0;
  for (const auto& iv : intervals)
    if (iv.valid && iv.violation_sigmas > 0.0) ++violating;
  std::cout << "intervals: " << intervals.size() << " (" << violating
            << " violating)\n";
  if (!timeline.summary) {
    std::cout << "bound: inconclusive (no violating interval)\n";
    return kInconclusive;
  }
  std::cout << "bound_over_c: " << timeline.summary->bound_over_c
            << (timeline.all_intervals_violating ? "" : " (partial coverage)")
            << "\n";
  return kOk;
}

int cmd_bound(const Config& cfg, std::uint64_t seed, const fs::path& out) {
  const double rho = cfg.get_double("bound", "rho", 6.84e-6);
  const double beta = cfg.get_double("bound", "beta", 1e-3);
  const double theta = cfg.get_double("bound", "theta_rad", M_PI / 2.0);
  const double T = cfg.get_double("bound", "T_s", 1800.0);
  if (spooky::rel::small_angle_marginal(T))
    std::cerr << "warning: omega*T > 0.2, small-angle regime is marginal\n";
  const auto r = spooky::rel::speed_bound_optimal(rho, {beta, theta, 0.0}, T);
  std::cout.precision(9);
  std::cout << "bound_over_c: " << r.bound_over_c << " (rho=" << r.rho
            << " beta=" << r.beta << " theta=" << r.theta_rad << " T=" << r.period_T_s
            << ")\n";
  if (!out.empty()) {
    fs::create_directories(out);
    std::ostringstream csv;
    csv << provenance(cfg, seed) << "\n"
        << "beta,theta_rad,rho,T_s,bound_over_c\n";
    char line[192];
    std::snprintf(line, sizeof line, "%.9g,%.9g,%.9g,%.9g,%.9g\n", r.beta,
                  r.theta_rad, r.rho, r.period_T_s, r.bound_over_c);
    csv << line;
    atomic_write(out / "bound.csv", csv.str());
  }
  return kOk;
}

int cmd_sweep(const Config& cfg, std::uint64_t seed, const fs::path& out) {
  const double rho = cfg.get_double("sweep", "rho", 6.84e-6);
  const double T = cfg.get_double("sweep", "T_s", 1800.0);
  const auto beta_grid = grid_from(cfg, "sweep", "beta", 1e-3, 0.99, 50);
  const auto theta_grid = grid_from(cfg, "sweep", "theta", 0.0, M_PI, 50);
  const auto table = spooky::rel::sweep_bound(rho, T, beta_grid, theta_grid);

  std::ostringstream csv;
  csv << provenance(cfg, seed) << "\n"
      << "beta,theta_rad,rho,T_s,bound_over_c\n";
  for (const auto& r : table) {
    char line[192];
    std::snprintf(line, sizeof line, "%.9g,%.9g,%.9g,%.9g,%.9g\n", r.beta,
                  r.theta_rad, r.rho, r.period_T_s, r.bound_over_c);
    csv << line;
  }
  fs::create_directories(out);
  atomic_write(out / "sweep.csv", csv.str());
  std::cout << "sweep: " << table.size() << " rows -> "
            << (out / "sweep.csv").string() << "\n";
  return kOk;
}

int cmd_verify(const Config& cfg, std::uint64_t seed, const fs::path& out) {
  const auto creation = event_from(cfg, "creation");
  const auto choice_a = event_from(cfg, "choice_a");
  const auto choice_b = event_from(cfg, "choice_b");
  const auto meas_a = event_from(cfg, "meas_a");
  const auto meas_b = event_from(cfg, "meas_b");

  const auto report =
      spooky::rel::verify_loopholes(creation, choice_a, choice_b, meas_a, meas_b);

  std::ostringstream csv;
  csv << provenance(cfg, seed) << "\n"
      << "check,spacelike,interval_m2\n";
  for (const auto& c : report.checks) {
    char line[192];
    std::snprintf(line, sizeof line, "%s,%s,%.9g\n", c.name.c_str(),
                  c.spacelike ? "true" : "false", c.interval_m2);
    csv << line;
    std::cout << (c.spacelike ? "PASS " : "FAIL ") << c.name << "\n";
  }
  std::cout << (report.pass ? "overall: PASS" : "overall: FAIL") << "\n";
  if (!out.empty()) {
    fs::create_directories(out);
    atomic_write(out / "loopholes.csv", csv.str());
  }
  return report.pass ? kOk : kCheckFailed;
}

struct ReproRow {
  std::string name;
  double expected, computed, tolerance;
  bool pass;
};

int cmd_reproduce(const Config& cfg, std::uint64_t seed, const fs::path& out) {
  using namespace spooky;
  std::vector<ReproRow> rows;
  auto add = [&rows](const std::string& name, double expected, double computed,
                     double tol) {
    rows.push_back({name, expected, computed, tol,
                    std::abs(computed - expected) <= tol});
  };

  const rel::FrameVelocity cmb{1e-3, M_PI / 2.0, 0.0};
  add("headline_bound_over_c", 1.38e4,
      rel::speed_bound_optimal(6.84e-6, cmb, 1800.0).bound_over_c, 0.01 * 1.38e4);
  add("high_beta_bound_over_c", 7.25,
      rel::speed_bound_optimal(6.84e-6, {0.9, M_PI / 2.0, 0.0}, 1800.0).bound_over_c,
      0.25);

  rel::SpacetimeEvent ea{{-7675.0, 0.0, 0.0}, 0.0, "earth"};
  rel::SpacetimeEvent eb{{7675.0, 0.0, 0.0}, 350e-12, "earth"};
  add("alignment_rho", 6.84e-6, rel::alignment_rho(ea, eb), 0.005 * 6.84e-6);

  const rel::SpacetimeEvent evE{{0, 0, 0}, 0.0, "earth"};
  const rel::SpacetimeEvent eva{{-7800, 0, 0}, 23.1e-6, "earth"};
  const rel::SpacetimeEvent evb{{7800, 0, 0}, 23.1e-6, "earth"};
  const rel::SpacetimeEvent evA{{-7800, 0, 0}, 26.1e-6, "earth"};
  const rel::SpacetimeEvent evB{{7800, 0, 0}, 26.1e-6, "earth"};
  const auto base = rel::verify_loopholes(evE, eva, evb, evA, evB);
  std::mt19937_64 rng(seed ^ 0x5b00c5ULL);
  std::uniform_real_distribution<double> ub(0.0, 0.99), ut(0.0, M_PI),
      up(0.0, 2.0 * M_PI);
  bool invariant = base.pass;
  for (int i = 0; i < 1000 && invariant; ++i) {
    rel::FrameVelocity v{ub(rng), ut(rng), up(rng)};
    const auto r = rel::verify_loopholes(
        rel::lorentz_boost(evE, v, "L"), rel::lorentz_boost(eva, v, "L"),
        rel::lorentz_boost(evb, v, "L"), rel::lorentz_boost(evA, v, "L"),
        rel::lorentz_boost(evB, v, "L"));
    invariant = r.pass == base.pass;
  }
  add("loopholes_pass_and_boost_invariant", 1.0,
      base.pass && invariant ? 1.0 : 0.0, 0.0);

  // theta = pi/2 minimizes the bound for every beta; everything exceeds 1.
  {
    bool ok = true;
    std::vector<double> betas(50), thetas(50);
    for (int i = 0; i < 50; ++i) {
      betas[i] = 1e-4 + (0.99 - 1e-4) * i / 49.0;
      thetas[i] = 1e-3 + (M_PI - 2e-3) * i / 49.0;
    }
    for (double b : betas) {
      const double at_min =
          rel::speed_bound_optimal(6.84e-6, {b, M_PI / 2.0, 0.0}, 1800.0).bound_over_c;
      for (double th : thetas) {
        const double v =
            rel::speed_bound_optimal(6.84e-6, {b, th, 0.0}, 1800.0).bound_over_c;
        ok = ok && v >= at_min - 1e-9 * at_min && v > 1.0;
      }
    }
    add("sweep_min_at_theta_pi_2_and_gt_1", 1.0, ok ? 1.0 : 0.0, 0.0);
  }

  const auto s = quantum::optimal_settings();
  const quantum::NoisySingletState ideal{1.0}, lab{0.913};
  auto s_of = [&](const quantum::NoisySingletState& st) {
    return quantum::chsh_value(
        quantum::correlation(st, s.a, s.b), quantum::correlation(st, s.a_prime, s.b),
        quantum::correlation(st, s.a, s.b_prime),
        quantum::correlation(st, s.a_prime, s.b_prime));
  };
  add("chsh_ideal", 2.0 * std::sqrt(2.0), s_of(ideal), 1e-12);
  add("chsh_visibility_0.913", 2.582, s_of(lab), 1e-3);

  std::ostringstream csv;
  csv << provenance(cfg, seed) << "\n"
      << "check,reference_value,computed_value,tolerance,pass\n";
  bool all_pass = true;
  std::printf("%-38s %14s %14s %10s  %s\n", "check", "expected", "computed",
              "tolerance", "result");
  for (const auto& r : rows) {
    all_pass = all_pass && r.pass;
    std::printf("%-38s %14.6g %14.6g %10.3g  %s\n", r.name.c_str(), r.expected,
                r.computed, r.tolerance, r.pass ? "PASS" : "FAIL");
    char line[256];
    std::snprintf(line, sizeof line, "%s,%.9g,%.9g,%.9g,%s\n", r.name.c_str(),
                  r.expected, r.computed, r.tolerance, r.pass ? "true" : "false");
    csv << line;
  }
  if (!out.empty()) {
    fs::create_directories(out);
    atomic_write(out / "reproduce.csv", csv.str());
  }
  return all_pass ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale Bell-test pipeline: simulation, CHSH analysis, and "
               "influence-speed bounds"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", in_dir = "out";
  std::uint64_t seed = 0;
  bool seed_given = false;
  app.add_option("--config", config_path, "Run configuration file (INI)");
  app.add_option("--seed", seed, "Deterministic RNG seed")
      ->each([&seed_given](const std::string&) { seed_given = true; });
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--in", in_dir, "Input directory (analyze)");

  auto* sim = app.add_subcommand("simulate", "Generate tag/sync streams");
  auto* ana = app.add_subcommand("analyze", "Sync, match, per-interval CHSH");
  auto* bnd = app.add_subcommand("bound", "Single optimal speed bound");
  auto* swp = app.add_subcommand("sweep", "Bound surface over (beta, theta)");
  auto* ver = app.add_subcommand("verify", "Space-like loophole checks");
  auto* rep = app.add_subcommand("reproduce", "Run all headline-number checks");
  for (auto* sub : {sim, ana, bnd, swp, ver, rep}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    Config cfg = config_path.empty() ? Config::parse_string("")
                                     : Config::parse_file(config_path);
    if (sim->parsed()) {
      if (!seed_given) {
        std::cerr << "error: simulate requires an explicit --seed\n";
        return kValidationError;
      }
      return cmd_simulate(cfg, seed, out_dir);
    }
    if (ana->parsed()) return cmd_analyze(cfg, seed, in_dir, out_dir);
    if (bnd->parsed()) return cmd_bound(cfg, seed, out_dir);
    if (swp->parsed()) return cmd_sweep(cfg, seed, out_dir);
    if (ver->parsed()) return cmd_verify(cfg, seed, out_dir);
    if (rep->parsed()) return cmd_reproduce(cfg, seed, out_dir);
  } catch (const spooky::analysis::SyncFailure& e) {
    std::cerr << "sync failure: " << e.what() << "\n";
    return kSyncFailure;
  } catch (const spooky::tag::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const spooky::config::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kValidationError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidationError;
  } catch (const std::domain_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidationError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationError;
  }
  return kOk;
}
