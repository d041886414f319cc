#include "spooky/relativity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "spooky/constants.hpp"

namespace spooky::rel {

namespace {
constexpr double kC = kSpeedOfLight;
}

Eigen::Vector3d FrameVelocity::direction() const {
  const double st = std::sin(theta_rad), ct = std::cos(theta_rad);
  return {st * std::cos(azimuth_rad), st * std::sin(azimuth_rad), ct};
}

BaselineGeometry BaselineGeometry::from_positions(const Eigen::Vector3d& a,
                                                  const Eigen::Vector3d& b,
                                                  const Eigen::Vector3d& source) {
  BaselineGeometry g;
  g.station_a.position_m = a;
  g.station_b.position_m = b;
  g.source.position_m = source;
  const Eigen::Vector3d d = b - a;
  g.separation_m = d.norm();
  g.alpha_rad = g.separation_m > 0.0 ? std::asin(d.z() / g.separation_m) : 0.0;
  return g;
}

SpacetimeEvent lorentz_boost(const SpacetimeEvent& e, const FrameVelocity& v,
                             const std::string& new_frame_id) {
  if (!(v.beta < 1.0) || v.beta < 0.0)
    throw std::domain_error("boost requires 0 <= beta < 1");
  const Eigen::Vector3d n = v.direction();
  const double gamma = 1.0 / std::sqrt(1.0 - v.beta * v.beta);
  const double r_par = n.dot(e.position_m);

  SpacetimeEvent out;
  out.time_s = gamma * (e.time_s - v.beta * r_par / kC);
  out.position_m =
      e.position_m + ((gamma - 1.0) * r_par - gamma * v.beta * kC * e.time_s) * n;
  out.frame_id = new_frame_id.empty() ? e.frame_id + "'" : new_frame_id;
  return out;
}

double default_lightlike_tol_m2() { return 1e-6; }  // (1 mm)^2

IntervalClass classify_interval(const SpacetimeEvent& a, const SpacetimeEvent& b,
                                double tol_m2) {
  if (a.frame_id != b.frame_id)
    throw std::invalid_argument("classify_interval: events in different frames");
  const double dr2 = (b.position_m - a.position_m).squaredNorm();
  const double cdt = kC * (b.time_s - a.time_s);
  const double s2 = dr2 - cdt * cdt;
  // Scale the band with the magnitude of the quantities being cancelled.
  const double scale = std::max(1.0, std::max(dr2, cdt * cdt));
  const double band = std::max(tol_m2, 1e-12 * scale);

  IntervalClass out;
  out.invariant_interval_m2 = s2;
  if (std::abs(s2) < band)
    out.kind = IntervalKind::Lightlike;
  else
    out.kind = s2 > 0.0 ? IntervalKind::Spacelike : IntervalKind::Timelike;
  return out;
}

double alignment_rho(const SpacetimeEvent& a, const SpacetimeEvent& b) {
  const auto cls = classify_interval(a, b);
  if (cls.kind != IntervalKind::Spacelike)
    throw std::domain_error("alignment_rho requires a spacelike pair");
  const double dr = (b.position_m - a.position_m).norm();
  return kC * std::abs(b.time_s - a.time_s) / dr;
}

double beta_parallel(const FrameVelocity& v, const BaselineGeometry& geom,
                     double t_s) {
  return v.beta * std::cos(v.theta_rad) * std::sin(geom.alpha_rad) +
         v.beta * std::sin(v.theta_rad) * std::cos(geom.alpha_rad) *
             std::cos(kEarthOmega * t_s);
}

double speed_bound_in_frame(const SpacetimeEvent& a, const SpacetimeEvent& b) {
  if (a.frame_id != b.frame_id)
    throw std::invalid_argument("speed_bound_in_frame: events in different frames");
  const double dr = (b.position_m - a.position_m).norm();
  const double dt = std::abs(b.time_s - a.time_s);
  if (dt == 0.0) return std::numeric_limits<double>::infinity();
  return dr / (kC * dt);
}

double speed_bound_earth_frame(double rho, const FrameVelocity& v,
                               double beta_par) {
  if (!(rho >= 0.0 && rho < 1.0))
    throw std::domain_error("rho must be in [0, 1)");
  if (!(v.beta < 1.0)) throw std::domain_error("beta must be < 1");
  const double denom = rho + std::abs(beta_par);
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  const double rhs =
      1.0 + (1.0 - v.beta * v.beta) * (1.0 - rho * rho) / (denom * denom);
  return std::sqrt(rhs);
}

bool small_angle_marginal(double period_T_s) {
  return kEarthOmega * period_T_s > 0.2;
}

SpeedBoundResult speed_bound_optimal(double rho, const FrameVelocity& v,
                                     double period_T_s) {
  const double wT = kEarthOmega * period_T_s;
  if (!(wT < 0.5))
    throw std::domain_error("speed_bound_optimal: wT >= 0.5 breaks the small-angle regime");
  const double beta_par_min = std::abs(v.beta * std::sin(v.theta_rad)) * wT / 2.0;

  SpeedBoundResult out;
  out.bound_over_c = speed_bound_earth_frame(rho, v, beta_par_min);
  out.rho = rho;
  out.beta = v.beta;
  out.theta_rad = v.theta_rad;
  out.period_T_s = period_T_s;
  return out;
}

std::vector<SpeedBoundResult> sweep_bound(double rho, double period_T_s,
                                          const std::vector<double>& beta_grid,
                                          const std::vector<double>& theta_grid) {
  if (beta_grid.empty() || theta_grid.empty())
    throw std::invalid_argument("sweep_bound: empty grid");
  std::vector<SpeedBoundResult> out;
  out.reserve(beta_grid.size() * theta_grid.size());
  for (double beta : beta_grid)
    for (double theta : theta_grid)
      out.push_back(speed_bound_optimal(rho, {beta, theta, 0.0}, period_T_s));
  return out;
}

LoopholeReport verify_loopholes(const SpacetimeEvent& creation,
                                const SpacetimeEvent& choice_a,
                                const SpacetimeEvent& choice_b,
                                const SpacetimeEvent& meas_a,
                                const SpacetimeEvent& meas_b) {
  const SpacetimeEvent* events[] = {&creation, &choice_a, &choice_b, &meas_a,
                                    &meas_b};
  for (const auto* e : events)
    if (e->frame_id != creation.frame_id)
      throw std::invalid_argument("verify_loopholes: events in different frames");

  auto check = [](const char* name, const SpacetimeEvent& x,
                  const SpacetimeEvent& y) {
    const auto cls = classify_interval(x, y);
    return LoopholeCheck{name, cls.kind == IntervalKind::Spacelike,
                         cls.invariant_interval_m2};
  };

  LoopholeReport report;
  report.checks.push_back(check("measurement_A_vs_measurement_B", meas_a, meas_b));
  report.checks.push_back(check("measurement_A_vs_choice_b", meas_a, choice_b));
  report.checks.push_back(check("measurement_B_vs_choice_a", meas_b, choice_a));
  report.checks.push_back(check("choice_a_vs_creation", choice_a, creation));
  report.checks.push_back(check("choice_b_vs_creation", choice_b, creation));
  report.pass = true;
  for (const auto& c : report.checks) report.pass = report.pass && c.spacelike;
  return report;
}

}  // namespace spooky::rel
