#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

namespace spooky::rel {

// One event: Earth-centered inertial axes (Z = rotation axis, X-Y equatorial).
struct SpacetimeEvent {
  Eigen::Vector3d position_m = Eigen::Vector3d::Zero();
  double time_s = 0.0;
  std::string frame_id = "earth";
};

// Velocity of a test frame relative to the current one. theta is the polar
// angle from the +Z axis, azimuth the angle of the equatorial projection.
struct FrameVelocity {
  double beta = 0.0;  // |v|/c, strictly < 1
  double theta_rad = 0.0;
  double azimuth_rad = 0.0;

  Eigen::Vector3d direction() const;
};

struct BaselineGeometry {
  SpacetimeEvent station_a;
  SpacetimeEvent station_b;
  SpacetimeEvent source;
  double separation_m = 0.0;
  double alpha_rad = 0.0;  // angle of the A-B axis to the equatorial plane

  static BaselineGeometry from_positions(const Eigen::Vector3d& a,
                                         const Eigen::Vector3d& b,
                                         const Eigen::Vector3d& source);
};

enum class IntervalKind { Spacelike, Timelike, Lightlike };

struct IntervalClass {
  IntervalKind kind = IntervalKind::Spacelike;
  double invariant_interval_m2 = 0.0;  // s^2 = |dr|^2 - c^2 dt^2
};

struct SpeedBoundResult {
  double bound_over_c = 0.0;
  double rho = 0.0;
  double beta = 0.0;
  double theta_rad = 0.0;
  double period_T_s = 0.0;
};

// Standard boost into a frame moving with velocity beta*c along v.direction()
// relative to e's frame. Throws std::domain_error if beta >= 1.
SpacetimeEvent lorentz_boost(const SpacetimeEvent& e, const FrameVelocity& v,
                             const std::string& new_frame_id = "");

// Magnitude-scaled default: (1 mm)^2 is far below detector granularity.
double default_lightlike_tol_m2();

// s^2 with a tolerance band for the lightlike classification.
// Throws std::invalid_argument when the frames differ.
IntervalClass classify_interval(const SpacetimeEvent& a, const SpacetimeEvent& b,
                                double tol_m2 = default_lightlike_tol_m2());

// rho = c|dt| / |dr|, defined only for spacelike pairs (throws otherwise).
double alignment_rho(const SpacetimeEvent& a, const SpacetimeEvent& b);

// beta_parallel(t) = beta cos(theta) sin(alpha) + beta sin(theta) cos(alpha) cos(wt)
double beta_parallel(const FrameVelocity& v, const BaselineGeometry& geom,
                     double t_s);

// |dr'| / (c |dt'|) in the events' common frame; +inf when dt' == 0.
double speed_bound_in_frame(const SpacetimeEvent& a, const SpacetimeEvent& b);

// sqrt(1 + (1-beta^2)(1-rho^2)/(rho+|beta_par|)^2); +inf when denominator is 0.
double speed_bound_earth_frame(double rho, const FrameVelocity& v,
                               double beta_par);

// Optimal bound over a measuring period T with beta_par minimized by Earth
// rotation: denominator rho + |beta sin(theta) * wT/2|. Requires wT < 0.5.
SpeedBoundResult speed_bound_optimal(double rho, const FrameVelocity& v,
                                     double period_T_s);

// True when wT exceeds the comfortable small-angle regime (wT > 0.2).
bool small_angle_marginal(double period_T_s);

std::vector<SpeedBoundResult> sweep_bound(double rho, double period_T_s,
                                          const std::vector<double>& beta_grid,
                                          const std::vector<double>& theta_grid);

struct LoopholeCheck {
  std::string name;
  bool spacelike = false;
  double interval_m2 = 0.0;
};

struct LoopholeReport {
  std::vector<LoopholeCheck> checks;
  bool pass = false;
};

// E = pair creation, a/b = setting choices, A/B = measurements. All five in
// one frame. Checks: A-B, A-b, B-a spacelike; a-E and b-E spacelike.
LoopholeReport verify_loopholes(const SpacetimeEvent& creation,
                                const SpacetimeEvent& choice_a,
                                const SpacetimeEvent& choice_b,
                                const SpacetimeEvent& meas_a,
                                const SpacetimeEvent& meas_b);

}  // namespace spooky::rel
