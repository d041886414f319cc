#include "spooky/geo.hpp"

#include <cmath>
#include <stdexcept>

#include "spooky/constants.hpp"

namespace spooky::geo {

Eigen::Vector3d geodetic_to_earth_frame(const GeodeticPoint& p, EarthModel model) {
  if (!(p.latitude_deg >= -90.0 && p.latitude_deg <= 90.0))
    throw std::domain_error("latitude out of [-90, 90]");
  if (!(p.longitude_deg >= -180.0 && p.longitude_deg <= 180.0))
    throw std::domain_error("longitude out of [-180, 180]");
  if (!std::isfinite(p.altitude_m))
    throw std::domain_error("altitude not finite");

  const double lat = p.latitude_deg * M_PI / 180.0;
  const double lon = p.longitude_deg * M_PI / 180.0;
  const double slat = std::sin(lat), clat = std::cos(lat);
  const double slon = std::sin(lon), clon = std::cos(lon);

  if (model == EarthModel::Sphere) {
    const double r = kEarthRadiusSphere + p.altitude_m;
    return {r * clat * clon, r * clat * slon, r * slat};
  }

  const double f = kWgs84Flattening;
  const double e2 = f * (2.0 - f);
  const double n = kWgs84SemiMajor / std::sqrt(1.0 - e2 * slat * slat);
  return {(n + p.altitude_m) * clat * clon, (n + p.altitude_m) * clat * slon,
          (n * (1.0 - e2) + p.altitude_m) * slat};
}

}  // namespace spooky::geo
