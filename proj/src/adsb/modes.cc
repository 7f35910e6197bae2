#include "skylisten/adsb/modes.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace skylisten::adsb {

namespace {

constexpr std::uint32_t kGenerator = 0xFFF409;

constexpr std::array<std::uint32_t, 256> MakeCrcTable() {
  std::array<std::uint32_t, 256> table{};
  for (std::uint32_t i = 0; i < 256; ++i) {
    std::uint32_t c = i << 16;
    for (int k = 0; k < 8; ++k) {
      c = (c & 0x800000) ? ((c << 1) ^ kGenerator) : (c << 1);
    }
    table[i] = c & 0xFFFFFF;
  }
  return table;
}

constexpr auto kCrcTable = MakeCrcTable();

int HexValue(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// ME field accessor: `first` is 1-based within the 56-bit ME block.
std::uint32_t Me(const RawFrame& raw, int first, int count) {
  return raw.Bits(32 + first, count);
}

Payload ParseIdentification(const RawFrame& raw) {
  std::string callsign;
  for (int i = 0; i < 8; ++i) {
    const char c = kIdentCharset[Me(raw, 9 + 6 * i, 6)];
    if (c == '#') return OpaqueMsg{};
    callsign += c;
  }
  while (!callsign.empty() && callsign.back() == ' ') callsign.pop_back();
  return IdentificationMsg{std::move(callsign)};
}

Payload ParseAirbornePosition(const RawFrame& raw) {
  AirbornePositionMsg msg;
  const std::uint32_t ac12 = Me(raw, 9, 12);
  if (ac12 != 0 && (ac12 & 0x010) != 0) msg.altitude_ft = DecodeAltitude(ac12);
  msg.cpr_format = Me(raw, 22, 1) ? CprFormat::kOdd : CprFormat::kEven;
  msg.cpr_lat = Me(raw, 23, 17);
  msg.cpr_lon = Me(raw, 40, 17);
  return msg;
}

Payload ParseVelocity(const RawFrame& raw) {
  const std::uint32_t subtype = Me(raw, 6, 3);
  // Airspeed subtypes carry magnetic heading rather than ground track.
  if (subtype != 1 && subtype != 2) return OpaqueMsg{};
  const std::uint32_t v_ew = Me(raw, 15, 10);
  const std::uint32_t v_ns = Me(raw, 26, 10);
  if (v_ew == 0 || v_ns == 0) return OpaqueMsg{};
  const double scale = subtype == 2 ? 4.0 : 1.0;
  double vx = (static_cast<double>(v_ew) - 1.0) * scale;
  double vy = (static_cast<double>(v_ns) - 1.0) * scale;
  if (Me(raw, 14, 1)) vx = -vx;
  if (Me(raw, 25, 1)) vy = -vy;

  VelocityMsg msg;
  msg.ground_speed_kt = std::hypot(vx, vy);
  double heading = std::atan2(vx, vy) * 180.0 / M_PI;
  if (heading < 0.0) heading += 360.0;
  if (heading >= 360.0) heading -= 360.0;
  msg.heading_deg = heading;
  const std::uint32_t vr = Me(raw, 38, 9);
  if (vr != 0) {
    const int rate = (static_cast<int>(vr) - 1) * 64;
    msg.vertical_rate_fpm = Me(raw, 37, 1) ? -rate : rate;
  }
  return msg;
}

}  // namespace

Icao Icao::FromHex(std::string_view hex) {
  if (hex.size() != 6) {
    throw AdsbError(AdsbErrc::kMalformedLine,
                    "icao must be 6 hex digits: '" + std::string(hex) + "'");
  }
  std::uint32_t v = 0;
  for (char c : hex) {
    const int d = HexValue(c);
    if (d < 0) {
      throw AdsbError(AdsbErrc::kMalformedLine,
                      "icao must be 6 hex digits: '" + std::string(hex) + "'");
    }
    v = (v << 4) | static_cast<std::uint32_t>(d);
  }
  return Icao(v);
}

std::string Icao::hex() const {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%06X", value_);
  return buf;
}

RawFrame::RawFrame(std::span<const std::uint8_t> bytes, double received_at)
    : size_(bytes.size()), received_at_(received_at) {
  if (size_ != kShortBytes && size_ != kLongBytes) {
    throw AdsbError(AdsbErrc::kBadLength,
                    "mode s frame must be 7 or 14 bytes, got " +
                        std::to_string(size_));
  }
  std::copy(bytes.begin(), bytes.end(), data_.begin());
}

std::uint32_t RawFrame::Bits(int first, int count) const {
  std::uint32_t v = 0;
  for (int i = 0; i < count; ++i) {
    const int bit = first - 1 + i;
    v = (v << 1) | ((data_[bit / 8] >> (7 - bit % 8)) & 1u);
  }
  return v;
}

std::uint32_t ComputeCrc(std::span<const std::uint8_t> bytes) {
  std::uint32_t crc = 0;
  const std::size_t data_bytes = bytes.size() - 3;
  for (std::size_t i = 0; i < data_bytes; ++i) {
    crc = ((crc << 8) ^ kCrcTable[((crc >> 16) ^ bytes[i]) & 0xFF]) & 0xFFFFFF;
  }
  return crc;
}

bool VerifyCrc(const RawFrame& raw) {
  const auto b = raw.bytes();
  const std::size_t n = b.size();
  const std::uint32_t parity = (static_cast<std::uint32_t>(b[n - 3]) << 16) |
                               (static_cast<std::uint32_t>(b[n - 2]) << 8) |
                               b[n - 1];
  return ComputeCrc(b) == parity;
}

int DecodeAltitude(std::uint32_t ac12) {
  if ((ac12 & 0x010) == 0) {
    throw AdsbError(AdsbErrc::kUndecodableAltitude,
                    "gillham-coded altitude (Q=0) is not supported");
  }
  const int n = static_cast<int>(((ac12 & 0xFE0) >> 1) | (ac12 & 0x00F));
  return 25 * n - 1000;
}

ModeSFrame ParseFrame(const RawFrame& raw) {
  ModeSFrame frame;
  frame.received_at = raw.received_at();
  frame.df = static_cast<int>(raw.Bits(1, 5));
  frame.icao = Icao(raw.Bits(9, 24));
  frame.crc_ok = VerifyCrc(raw);
  if (frame.df == 11 || frame.df == 17 || frame.df == 18) {
    frame.capability = static_cast<int>(raw.Bits(6, 3));
  }
  if ((frame.df == 17 || frame.df == 18) &&
      raw.size() == RawFrame::kLongBytes) {
    frame.type_code = static_cast<int>(Me(raw, 1, 5));
  }
  if (frame.df != 17 || raw.size() != RawFrame::kLongBytes) return frame;

  const int tc = frame.type_code;
  if (tc >= 1 && tc <= 4) {
    frame.payload = ParseIdentification(raw);
  } else if (tc >= 9 && tc <= 18) {
    frame.payload = ParseAirbornePosition(raw);
  } else if (tc == 19) {
    frame.payload = ParseVelocity(raw);
  }
  return frame;
}

}  // namespace skylisten::adsb
