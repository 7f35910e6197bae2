#include "skylisten/adsb/cpr.h"

#include <algorithm>
#include <cmath>

namespace skylisten::adsb {

namespace {

// Floored modulo, result in [0, b).
double Mod(double a, double b) {
  const double r = a - b * std::floor(a / b);
  return r >= b ? 0.0 : r;
}

int ModInt(int a, int b) {
  const int r = a % b;
  return r < 0 ? r + b : r;
}

double NormalizeLon(double lon) {
  lon = Mod(lon + 180.0, 360.0) - 180.0;
  return lon;
}

int FormatIndex(CprFormat f) { return f == CprFormat::kOdd ? 1 : 0; }

}  // namespace

int NumLongitudeZones(double lat_deg) {
  const double lat = std::fabs(lat_deg);
  if (lat == 0.0) return 59;
  if (lat == 87.0) return 2;
  if (lat > 87.0) return 1;
  const double nz = kCprLatZones;
  const double a = 1.0 - std::cos(M_PI / (2.0 * nz));
  const double c = std::cos(M_PI / 180.0 * lat);
  const double nl = std::floor(2.0 * M_PI / std::acos(1.0 - a / (c * c)));
  return static_cast<int>(nl);
}

double LatZoneSize(CprFormat format) {
  return 360.0 / (4.0 * kCprLatZones - FormatIndex(format));
}

LatLon DecodeCprGlobal(const AirbornePositionMsg& even,
                       const AirbornePositionMsg& odd, CprFormat newest) {
  const double yz0 = even.cpr_lat / kCprScale;
  const double yz1 = odd.cpr_lat / kCprScale;
  const double xz0 = even.cpr_lon / kCprScale;
  const double xz1 = odd.cpr_lon / kCprScale;
  const double dlat0 = LatZoneSize(CprFormat::kEven);
  const double dlat1 = LatZoneSize(CprFormat::kOdd);

  const int j = static_cast<int>(std::floor(59.0 * yz0 - 60.0 * yz1 + 0.5));
  double lat0 = dlat0 * (ModInt(j, 60) + yz0);
  double lat1 = dlat1 * (ModInt(j, 59) + yz1);
  if (lat0 >= 270.0) lat0 -= 360.0;
  if (lat1 >= 270.0) lat1 -= 360.0;
  if (lat0 < -90.0 || lat0 > 90.0 || lat1 < -90.0 || lat1 > 90.0) {
    throw AdsbError(AdsbErrc::kZoneMismatch, "cpr pair decodes off-globe");
  }
  const int nl = NumLongitudeZones(lat0);
  if (nl != NumLongitudeZones(lat1)) {
    throw AdsbError(AdsbErrc::kZoneMismatch,
                    "cpr pair straddles a longitude zone boundary");
  }

  const int i = FormatIndex(newest);
  const double lat = i == 0 ? lat0 : lat1;
  const int ni = std::max(nl - i, 1);
  const double dlon = 360.0 / ni;
  const int m = static_cast<int>(
      std::floor(xz0 * (nl - 1) - xz1 * nl + 0.5));
  const double xz = i == 0 ? xz0 : xz1;
  const double lon = dlon * (ModInt(m, ni) + xz);
  return {lat, NormalizeLon(lon)};
}

LatLon DecodeCprGlobal(const TimedPosition& even, const TimedPosition& odd,
                       double pairing_window_s) {
  if (std::fabs(even.received_at - odd.received_at) > pairing_window_s) {
    throw AdsbError(AdsbErrc::kStalePair,
                    "cpr frames are further apart than the pairing window");
  }
  const CprFormat newest = odd.received_at >= even.received_at
                               ? CprFormat::kOdd
                               : CprFormat::kEven;
  return DecodeCprGlobal(even.msg, odd.msg, newest);
}

LatLon DecodeCprLocal(const AirbornePositionMsg& msg, LatLon ref) {
  const int i = FormatIndex(msg.cpr_format);
  const double dlat = LatZoneSize(msg.cpr_format);
  const double yz = msg.cpr_lat / kCprScale;
  const double xz = msg.cpr_lon / kCprScale;

  const double j = std::floor(ref.lat_deg / dlat) +
                   std::floor(0.5 + Mod(ref.lat_deg, dlat) / dlat - yz);
  const double lat = dlat * (j + yz);
  const int ni = std::max(NumLongitudeZones(lat) - i, 1);
  const double dlon = 360.0 / ni;
  const double m = std::floor(ref.lon_deg / dlon) +
                   std::floor(0.5 + Mod(ref.lon_deg, dlon) / dlon - xz);
  return {lat, NormalizeLon(dlon * (m + xz))};
}

}  // namespace skylisten::adsb
