#pragma once

#include "ltr/geometry/pose.hpp"

namespace ltr::geometry {

struct GeoCoordinate {
  double latitude = 0.0;   // degrees
  double longitude = 0.0;  // degrees
  double altitude = 0.0;   // meters
};

inline constexpr double kEarthRadius = 6378137.0;  // WGS-84 equatorial

/// Scaled Mercator projection relative to `origin`: the scale is
/// cos(origin latitude), x/y are shifted so `origin` maps to
/// (0, 0, origin.altitude), and z is the altitude.
/// Throws PoleSingularity for |latitude| > 89.9°.
Vec3 geo_to_local(const GeoCoordinate& g, const GeoCoordinate& origin);

/// Inverse of geo_to_local for the same origin.
GeoCoordinate local_to_geo(const Vec3& local, const GeoCoordinate& origin);

}  // namespace ltr::geometry
