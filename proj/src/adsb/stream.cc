#include "skylisten/adsb/stream.h"

#include <charconv>
#include <cstdio>
#include <vector>

namespace skylisten::adsb {

namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void Malformed(std::string_view why, std::string_view line) {
  throw AdsbError(AdsbErrc::kMalformedLine,
                  std::string(why) + ": '" + std::string(line) + "'");
}

int Nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::vector<std::string_view> SplitCommas(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, comma - start));
    start = comma + 1;
  }
}

template <typename T>
std::optional<T> ParseNumber(std::string_view field, std::string_view line) {
  field = Trim(field);
  if (field.empty()) return std::nullopt;
  if constexpr (std::is_integral_v<T>) {
    T v{};
    // Some feeders write integral fields with a trailing ".0".
    const auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec == std::errc() &&
        (p == field.data() + field.size() || *p == '.')) {
      return v;
    }
  } else {
    T v{};
    const auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec == std::errc() && p == field.data() + field.size()) return v;
  }
  Malformed("bad numeric sbs field", line);
}

}  // namespace

RawFrame ParseAvrLine(std::string_view line, double received_at) {
  const std::string_view s = Trim(line);
  if (s.size() < 2 || s.front() != '*' || s.back() != ';') {
    Malformed("avr line needs '*' and ';' sentinels", line);
  }
  const std::string_view hex = s.substr(1, s.size() - 2);
  if (hex.size() % 2 != 0) Malformed("odd hex length", line);
  if (hex.size() != 14 && hex.size() != 28) {
    Malformed("avr payload must be 14 or 28 hex digits", line);
  }
  std::uint8_t bytes[14];
  for (std::size_t i = 0; i < hex.size() / 2; ++i) {
    const int hi = Nibble(hex[2 * i]);
    const int lo = Nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) Malformed("non-hex character", line);
    bytes[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return RawFrame({bytes, hex.size() / 2}, received_at);
}

std::string FormatAvr(const RawFrame& raw) {
  static constexpr char kDigits[] = "0123456789ABCDEF";
  std::string out = "*";
  for (std::uint8_t b : raw.bytes()) {
    out += kDigits[b >> 4];
    out += kDigits[b & 0xF];
  }
  out += ';';
  return out;
}

TimedAvr ParseTimedAvrLine(std::string_view line) {
  const std::string_view s = Trim(line);
  const auto space = s.find_first_of(" \t");
  if (space == std::string_view::npos) Malformed("missing timestamp", line);
  double t = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + space, t);
  if (ec != std::errc() || p != s.data() + space) {
    Malformed("bad timestamp", line);
  }
  return {t, ParseAvrLine(s.substr(space + 1), t)};
}

std::string FormatTimedAvr(double t_s, const RawFrame& raw) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f ", t_s);
  return buf + FormatAvr(raw);
}

SbsMessage ParseSbsLine(std::string_view line) {
  const std::string_view s = Trim(line);
  const auto f = SplitCommas(s);
  if (f.size() < 10 || Trim(f[0]) != "MSG") {
    Malformed("not an sbs MSG row", line);
  }
  auto field = [&](std::size_t one_based) -> std::string_view {
    return one_based <= f.size() ? Trim(f[one_based - 1]) : std::string_view{};
  };
  SbsMessage msg;
  msg.transmission_type = ParseNumber<int>(field(2), line).value_or(0);
  try {
    msg.icao = Icao::FromHex(field(5));
  } catch (const AdsbError&) {
    Malformed("bad hex ident", line);
  }
  if (!field(11).empty()) {
    std::string cs(field(11));
    while (!cs.empty() && cs.back() == ' ') cs.pop_back();
    msg.callsign = cs;
  }
  msg.altitude_ft = ParseNumber<int>(field(12), line);
  msg.ground_speed_kt = ParseNumber<double>(field(13), line);
  msg.track_deg = ParseNumber<double>(field(14), line);
  const auto lat = ParseNumber<double>(field(15), line);
  const auto lon = ParseNumber<double>(field(16), line);
  if (lat.has_value() != lon.has_value()) Malformed("lat without lon", line);
  if (lat) {
    if (*lat < -90.0 || *lat > 90.0 || *lon < -180.0 || *lon > 180.0) {
      Malformed("position out of range", line);
    }
    msg.position = LatLon{*lat, *lon};
  }
  msg.vertical_rate_fpm = ParseNumber<int>(field(17), line);
  if (const auto g = ParseNumber<int>(field(22), line)) msg.on_ground = *g != 0;
  return msg;
}

std::string FormatSbsLine(const SbsMessage& msg) {
  std::vector<std::string> f(22);
  f[0] = "MSG";
  f[1] = std::to_string(msg.transmission_type);
  f[2] = "1";
  f[3] = "1";
  f[4] = msg.icao.hex();
  f[5] = "1";
  if (msg.callsign) f[10] = *msg.callsign;
  if (msg.altitude_ft) f[11] = std::to_string(*msg.altitude_ft);
  char buf[32];
  if (msg.ground_speed_kt) {
    std::snprintf(buf, sizeof buf, "%.1f", *msg.ground_speed_kt);
    f[12] = buf;
  }
  if (msg.track_deg) {
    std::snprintf(buf, sizeof buf, "%.1f", *msg.track_deg);
    f[13] = buf;
  }
  if (msg.position) {
    std::snprintf(buf, sizeof buf, "%.6f", msg.position->lat_deg);
    f[14] = buf;
    std::snprintf(buf, sizeof buf, "%.6f", msg.position->lon_deg);
    f[15] = buf;
  }
  if (msg.vertical_rate_fpm) f[16] = std::to_string(*msg.vertical_rate_fpm);
  if (msg.on_ground) f[21] = *msg.on_ground ? "-1" : "0";
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i > 0) out += ',';
    out += f[i];
  }
  return out;
}

}  // namespace skylisten::adsb
