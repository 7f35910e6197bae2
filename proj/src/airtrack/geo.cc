#include "skylisten/airtrack/geo.h"

#include <algorithm>
#include <cmath>

namespace skylisten::airtrack {

double HaversineKm(LatLon a, LatLon b) {
  constexpr double kRad = M_PI / 180.0;
  const double dlat = (b.lat_deg - a.lat_deg) * kRad;
  const double dlon = (b.lon_deg - a.lon_deg) * kRad;
  const double s1 = std::sin(dlat / 2.0);
  const double s2 = std::sin(dlon / 2.0);
  const double h = s1 * s1 + std::cos(a.lat_deg * kRad) *
                                 std::cos(b.lat_deg * kRad) * s2 * s2;
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(std::clamp(h, 0.0, 1.0)));
}

}  // namespace skylisten::airtrack
