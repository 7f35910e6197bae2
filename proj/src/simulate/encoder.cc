#include "skylisten/simulate/encoder.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "skylisten/adsb/cpr.h"

namespace skylisten::simulate {

namespace {

class BitWriter {
 public:
  explicit BitWriter(std::size_t n_bytes) : n_bytes_(n_bytes) {}

  void Put(std::uint32_t value, int width) {
    for (int i = width - 1; i >= 0; --i) {
      if ((value >> i) & 1u) bytes_[pos_ / 8] |= 0x80 >> (pos_ % 8);
      ++pos_;
    }
  }

  // Appends the 24-bit parity over everything written so far.
  adsb::RawFrame Finish(double received_at) {
    const std::uint32_t parity =
        LongDivisionParity({bytes_.data(), n_bytes_});
    Put(parity, 24);
    return adsb::RawFrame({bytes_.data(), n_bytes_}, received_at);
  }

 private:
  std::array<std::uint8_t, 14> bytes_{};
  std::size_t n_bytes_;
  int pos_ = 0;
};

double Mod(double a, double b) { return a - b * std::floor(a / b); }

BitWriter Df17Header(adsb::Icao icao) {
  BitWriter w(14);
  w.Put(17, 5);
  w.Put(5, 3);  // CA: level 2+ transponder, airborne
  w.Put(icao.value(), 24);
  return w;
}

}  // namespace

CprIndices EncodeCpr(double lat_deg, double lon_deg, adsb::CprFormat format) {
  const int i = format == adsb::CprFormat::kOdd ? 1 : 0;
  const double dlat = 360.0 / (4 * adsb::kCprLatZones - i);
  const double scale = adsb::kCprScale;
  const double yz = std::floor(scale * Mod(lat_deg, dlat) / dlat + 0.5);
  const double rlat = dlat * (yz / scale + std::floor(lat_deg / dlat));
  const int nl = adsb::NumLongitudeZones(rlat);
  const double dlon = 360.0 / std::max(nl - i, 1);
  const double xz = std::floor(scale * Mod(lon_deg, dlon) / dlon + 0.5);
  return {static_cast<std::uint32_t>(yz) & 0x1FFFF,
          static_cast<std::uint32_t>(xz) & 0x1FFFF};
}

std::uint32_t EncodeAc12(int altitude_ft) {
  if (altitude_ft < -1000 || altitude_ft > 50175) {
    throw Error("altitude " + std::to_string(altitude_ft) +
                " ft is outside the 25 ft encoding range");
  }
  const auto n = static_cast<std::uint32_t>(
      std::lround((altitude_ft + 1000) / 25.0));
  return ((n & 0x7F0) << 1) | 0x010 | (n & 0x00F);
}

std::uint32_t LongDivisionParity(std::span<const std::uint8_t> frame) {
  // Work on an explicit bit vector: data bits followed by 24 zero bits,
  // divided by the 25-bit generator 1 1111 1111 1111 0100 0000 1001.
  constexpr std::uint32_t kPoly25 = 0x1FFF409;
  const std::size_t data_bits = (frame.size() - 3) * 8;
  std::vector<int> bits(data_bits + 24, 0);
  for (std::size_t i = 0; i < data_bits; ++i) {
    bits[i] = (frame[i / 8] >> (7 - i % 8)) & 1;
  }
  for (std::size_t i = 0; i < data_bits; ++i) {
    if (!bits[i]) continue;
    for (int k = 0; k < 25; ++k) {
      bits[i + k] ^= (kPoly25 >> (24 - k)) & 1;
    }
  }
  std::uint32_t rem = 0;
  for (std::size_t i = data_bits; i < data_bits + 24; ++i) {
    rem = (rem << 1) | static_cast<std::uint32_t>(bits[i]);
  }
  return rem;
}

adsb::RawFrame EncodeAirbornePosition(adsb::Icao icao, double lat_deg,
                                      double lon_deg,
                                      std::optional<int> altitude_ft,
                                      adsb::CprFormat format,
                                      double received_at) {
  const CprIndices cpr = EncodeCpr(lat_deg, lon_deg, format);
  BitWriter w = Df17Header(icao);
  w.Put(11, 5);  // type code: airborne position, barometric altitude
  w.Put(0, 2);   // surveillance status
  w.Put(0, 1);   // single antenna flag
  w.Put(altitude_ft ? EncodeAc12(*altitude_ft) : 0, 12);
  w.Put(0, 1);  // time flag
  w.Put(format == adsb::CprFormat::kOdd ? 1 : 0, 1);
  w.Put(cpr.lat, 17);
  w.Put(cpr.lon, 17);
  return w.Finish(received_at);
}

adsb::RawFrame EncodeIdentification(adsb::Icao icao, std::string_view callsign,
                                    double received_at) {
  if (callsign.size() > 8) throw Error("callsign longer than 8 characters");
  BitWriter w = Df17Header(icao);
  w.Put(4, 5);  // type code 4, category set A
  w.Put(0, 3);
  for (std::size_t i = 0; i < 8; ++i) {
    const char c = i < callsign.size() ? callsign[i] : ' ';
    std::uint32_t code;
    if (c >= 'A' && c <= 'Z') {
      code = static_cast<std::uint32_t>(c - 'A' + 1);
    } else if (c >= '0' && c <= '9') {
      code = static_cast<std::uint32_t>(c - '0' + 48);
    } else if (c == ' ') {
      code = 32;
    } else {
      throw Error("callsign character '" + std::string(1, c) +
                  "' is not in the identification alphabet");
    }
    w.Put(code, 6);
  }
  return w.Finish(received_at);
}

adsb::RawFrame EncodeVelocity(adsb::Icao icao, double ground_speed_kt,
                              double heading_deg, int vertical_rate_fpm,
                              double received_at) {
  const double rad = heading_deg * M_PI / 180.0;
  const double vx = ground_speed_kt * std::sin(rad);
  const double vy = ground_speed_kt * std::cos(rad);
  const bool supersonic = ground_speed_kt > 1021.0;
  const double unit = supersonic ? 4.0 : 1.0;
  auto component = [&](double v) {
    return std::min<std::uint32_t>(
        static_cast<std::uint32_t>(std::lround(std::fabs(v) / unit)) + 1, 1023);
  };
  const auto vr = std::min<std::uint32_t>(
      static_cast<std::uint32_t>(std::lround(std::abs(vertical_rate_fpm) / 64.0)) + 1,
      511);

  BitWriter w = Df17Header(icao);
  w.Put(19, 5);
  w.Put(supersonic ? 2 : 1, 3);
  w.Put(0, 1);  // intent change
  w.Put(0, 1);  // IFR capability
  w.Put(0, 3);  // NUCv
  w.Put(vx < 0 ? 1 : 0, 1);
  w.Put(component(vx), 10);
  w.Put(vy < 0 ? 1 : 0, 1);
  w.Put(component(vy), 10);
  w.Put(0, 1);  // vertical rate source: GNSS
  w.Put(vertical_rate_fpm < 0 ? 1 : 0, 1);
  w.Put(vr, 9);
  w.Put(0, 2);
  w.Put(0, 1);
  w.Put(0, 7);
  return w.Finish(received_at);
}

adsb::RawFrame EncodeSurfacePosition(adsb::Icao icao, double lat_deg,
                                     double lon_deg, adsb::CprFormat format,
                                     double received_at) {
  const CprIndices cpr = EncodeCpr(lat_deg, lon_deg, format);
  BitWriter w(14);
  w.Put(17, 5);
  w.Put(4, 3);  // CA: on the ground
  w.Put(icao.value(), 24);
  w.Put(6, 5);
  w.Put(0, 7);  // movement
  w.Put(0, 1);  // track status
  w.Put(0, 7);  // track
  w.Put(0, 1);
  w.Put(format == adsb::CprFormat::kOdd ? 1 : 0, 1);
  w.Put(cpr.lat, 17);
  w.Put(cpr.lon, 17);
  return w.Finish(received_at);
}

adsb::RawFrame EncodeAllCallReply(adsb::Icao icao, double received_at) {
  BitWriter w(7);
  w.Put(11, 5);
  w.Put(5, 3);
  w.Put(icao.value(), 24);
  return w.Finish(received_at);
}

}  // namespace skylisten::simulate
