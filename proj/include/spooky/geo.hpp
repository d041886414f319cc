#pragma once

#include <Eigen/Core>

namespace spooky::geo {

struct GeodeticPoint {
  double latitude_deg = 0.0;   // [-90, 90]
  double longitude_deg = 0.0;  // [-180, 180]
  double altitude_m = 0.0;
};

enum class EarthModel { Sphere, Wgs84 };

// Geodetic -> Earth-centered Cartesian. Longitude 0 maps to +X, the north
// pole to +Z. Throws std::domain_error for out-of-range latitude/longitude.
Eigen::Vector3d geodetic_to_earth_frame(const GeodeticPoint& p,
                                        EarthModel model = EarthModel::Wgs84);

}  // namespace spooky::geo
