#ifndef SKYLISTEN_SIMULATE_ENCODER_H_
#define SKYLISTEN_SIMULATE_ENCODER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "skylisten/adsb/modes.h"

namespace skylisten::simulate {

// Frame synthesis for the simulator. Everything here is written against the
// wire format directly and shares no bit-level code with the decoder, so the
// two act as oracles for each other.

struct CprIndices {
  std::uint32_t lat = 0;  // 17 bits
  std::uint32_t lon = 0;  // 17 bits

  friend bool operator==(const CprIndices&, const CprIndices&) = default;
};

// Airborne CPR encoding. Requires |lat_deg| < 87.
CprIndices EncodeCpr(double lat_deg, double lon_deg, adsb::CprFormat format);

// 12-bit altitude field with Q=1 (25 ft steps). Rounds to the nearest 25 ft;
// throws skylisten::Error outside [-1000, 50175].
std::uint32_t EncodeAc12(int altitude_ft);

// CRC-24 remainder by plain polynomial long division, one bit at a time.
std::uint32_t LongDivisionParity(std::span<const std::uint8_t> frame);

adsb::RawFrame EncodeAirbornePosition(adsb::Icao icao, double lat_deg,
                                      double lon_deg,
                                      std::optional<int> altitude_ft,
                                      adsb::CprFormat format,
                                      double received_at = 0.0);

// Callsign of up to 8 characters from [A-Z0-9 ]; throws otherwise.
adsb::RawFrame EncodeIdentification(adsb::Icao icao, std::string_view callsign,
                                    double received_at = 0.0);

// Ground-speed velocity (subtype 1, or 2 above 1021 kt).
adsb::RawFrame EncodeVelocity(adsb::Icao icao, double ground_speed_kt,
                              double heading_deg, int vertical_rate_fpm,
                              double received_at = 0.0);

// DF17 surface position (type code 6) with zeroed movement/track fields.
adsb::RawFrame EncodeSurfacePosition(adsb::Icao icao, double lat_deg,
                                     double lon_deg, adsb::CprFormat format,
                                     double received_at = 0.0);

// 56-bit DF11 all-call reply with interrogator id 0.
adsb::RawFrame EncodeAllCallReply(adsb::Icao icao, double received_at = 0.0);

}  // namespace skylisten::simulate

#endif  // SKYLISTEN_SIMULATE_ENCODER_H_
