#include "ltr/geometry/geo.hpp"

#include <cmath>
#include <numbers>

#include "ltr/error.hpp"

namespace ltr::geometry {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

void check(const GeoCoordinate& g) {
  if (!(std::abs(g.latitude) <= 90.0) || !(std::abs(g.longitude) <= 180.0)) {
    throw InvalidArgument("latitude/longitude out of range");
  }
  if (std::abs(g.latitude) > 89.9) throw PoleSingularity("latitude too close to a pole");
}

Vec2 mercator(double lat_deg, double lon_deg, double scale) {
  const double lat = lat_deg * kDeg;
  return {scale * kEarthRadius * lon_deg * kDeg,
          scale * kEarthRadius * std::log(std::tan(std::numbers::pi / 4.0 + lat / 2.0))};
}

}  // namespace

Vec3 geo_to_local(const GeoCoordinate& g, const GeoCoordinate& origin) {
  check(g);
  check(origin);
  const double scale = std::cos(origin.latitude * kDeg);
  const Vec2 p = mercator(g.latitude, g.longitude, scale);
  const Vec2 o = mercator(origin.latitude, origin.longitude, scale);
  return {p.x() - o.x(), p.y() - o.y(), g.altitude};
}

GeoCoordinate local_to_geo(const Vec3& local, const GeoCoordinate& origin) {
  check(origin);
  const double scale = std::cos(origin.latitude * kDeg);
  const Vec2 o = mercator(origin.latitude, origin.longitude, scale);
  const double mx = (local.x() + o.x()) / (scale * kEarthRadius);
  const double my = (local.y() + o.y()) / (scale * kEarthRadius);
  GeoCoordinate g;
  g.longitude = mx / kDeg;
  g.latitude = (2.0 * std::atan(std::exp(my)) - std::numbers::pi / 2.0) / kDeg;
  g.altitude = local.z();
  return g;
}

}  // namespace ltr::geometry
