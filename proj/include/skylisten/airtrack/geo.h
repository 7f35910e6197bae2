#ifndef SKYLISTEN_AIRTRACK_GEO_H_
#define SKYLISTEN_AIRTRACK_GEO_H_

#include "skylisten/geo.h"

namespace skylisten::airtrack {

inline constexpr double kEarthRadiusKm = 6371.0088;

// Great-circle distance on the mean-radius sphere. Horizontal only.
double HaversineKm(LatLon a, LatLon b);

}  // namespace skylisten::airtrack

#endif  // SKYLISTEN_AIRTRACK_GEO_H_
