#ifndef SKYLISTEN_ADSB_STREAM_H_
#define SKYLISTEN_ADSB_STREAM_H_

#include <optional>
#include <string>
#include <string_view>

#include "skylisten/adsb/modes.h"
#include "skylisten/geo.h"

namespace skylisten::adsb {

// AVR text: '*' + 14 or 28 hex digits + ';'. Surrounding whitespace is
// ignored. Throws kMalformedLine.
RawFrame ParseAvrLine(std::string_view line, double received_at = 0.0);
std::string FormatAvr(const RawFrame& raw);  // uppercase hex

// Replay streams prefix each AVR line with a logical timestamp in seconds:
//   "12.500 *8D7C7CD058C382D690C8AC2863A7;"
struct TimedAvr {
  double t_s = 0.0;
  RawFrame frame;
};
TimedAvr ParseTimedAvrLine(std::string_view line);
std::string FormatTimedAvr(double t_s, const RawFrame& raw);

// One SBS/BaseStation CSV row ("MSG,3,..."). Fields are 1-based in the
// usual documentation: 5 = hex ident, 11 = callsign, 12 = altitude,
// 13 = ground speed, 14 = track, 15/16 = lat/lon, 17 = vertical rate,
// 22 = on-ground flag. Positions here are already decoded.
struct SbsMessage {
  int transmission_type = 0;
  Icao icao;
  std::optional<std::string> callsign;
  std::optional<int> altitude_ft;
  std::optional<double> ground_speed_kt;
  std::optional<double> track_deg;
  std::optional<LatLon> position;
  std::optional<int> vertical_rate_fpm;
  std::optional<bool> on_ground;
};

SbsMessage ParseSbsLine(std::string_view line);

// Writes a 22-field MSG row. Date/time fields are left empty; replay streams
// carry their own logical timestamp prefix instead.
std::string FormatSbsLine(const SbsMessage& msg);

}  // namespace skylisten::adsb

#endif  // SKYLISTEN_ADSB_STREAM_H_
