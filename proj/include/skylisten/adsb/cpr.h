#ifndef SKYLISTEN_ADSB_CPR_H_
#define SKYLISTEN_ADSB_CPR_H_

#include "skylisten/adsb/modes.h"
#include "skylisten/geo.h"

namespace skylisten::adsb {

// Airborne compact position reporting: 15 latitude zones per hemisphere
// quarter, 17-bit quantization.
inline constexpr int kCprLatZones = 15;
inline constexpr double kCprScale = 131072.0;  // 2^17
inline constexpr double kDefaultPairingWindowS = 10.0;

// Number of longitude zones at latitude `lat_deg` (1..59).
int NumLongitudeZones(double lat_deg);

// Latitude zone size for the given format: 360/60 even, 360/59 odd.
double LatZoneSize(CprFormat format);

struct TimedPosition {
  AirbornePositionMsg msg;
  double received_at = 0.0;
};

// Global decode from an even/odd pair. The position is reported for the
// frame named by `newest`. Throws kZoneMismatch when the two frames resolve
// to latitudes with different longitude-zone counts.
LatLon DecodeCprGlobal(const AirbornePositionMsg& even,
                       const AirbornePositionMsg& odd, CprFormat newest);

// As above, but takes timestamps: newest is the later frame and the pair is
// rejected with kStalePair when further apart than `pairing_window_s`.
LatLon DecodeCprGlobal(const TimedPosition& even, const TimedPosition& odd,
                       double pairing_window_s = kDefaultPairingWindowS);

// Single-frame decode relative to a reference within half a zone (~180 NM).
// Outside that radius the nearest candidate is a wrong zone; the function
// cannot detect this.
LatLon DecodeCprLocal(const AirbornePositionMsg& msg, LatLon ref);

}  // namespace skylisten::adsb

#endif  // SKYLISTEN_ADSB_CPR_H_
