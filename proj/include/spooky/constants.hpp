#pragma once

namespace spooky {

// Speed of light in vacuum, m/s (exact).
inline constexpr double kSpeedOfLight = 299792458.0;

// Earth sidereal angular velocity, rad/s.
inline constexpr double kEarthOmega = 7.2921159e-5;

// Mean Earth radius for the spherical model, m.
inline constexpr double kEarthRadiusSphere = 6371000.0;

// WGS84 ellipsoid.
inline constexpr double kWgs84SemiMajor = 6378137.0;
inline constexpr double kWgs84Flattening = 1.0 / 298.257223563;

inline constexpr double kPicosecond = 1e-12;

}  // namespace spooky
