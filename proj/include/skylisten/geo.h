#ifndef SKYLISTEN_GEO_H_
#define SKYLISTEN_GEO_H_

namespace skylisten {

struct LatLon {
  double lat_deg = 0.0;
  double lon_deg = 0.0;

  friend bool operator==(const LatLon&, const LatLon&) = default;
};

}  // namespace skylisten

#endif  // SKYLISTEN_GEO_H_
