#ifndef SKYLISTEN_ADSB_MODES_H_
#define SKYLISTEN_ADSB_MODES_H_

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "skylisten/error.h"

namespace skylisten::adsb {

enum class AdsbErrc {
  kBadLength,
  kMalformedLine,
  kZoneMismatch,
  kStalePair,
  kUndecodableAltitude,
};
using AdsbError = CodedError<AdsbErrc>;

// 24-bit ICAO aircraft address.
class Icao {
 public:
  constexpr Icao() = default;
  explicit constexpr Icao(std::uint32_t value) : value_(value & 0xFFFFFF) {}

  // Accepts exactly six hex digits, either case.
  static Icao FromHex(std::string_view hex);

  constexpr std::uint32_t value() const { return value_; }
  std::string hex() const;  // six uppercase digits

  friend constexpr auto operator<=>(Icao, Icao) = default;

 private:
  std::uint32_t value_ = 0;
};

// One received Mode S downlink: 56 or 112 bits.
class RawFrame {
 public:
  static constexpr std::size_t kShortBytes = 7;
  static constexpr std::size_t kLongBytes = 14;

  // Throws AdsbError(kBadLength) unless bytes.size() is 7 or 14.
  explicit RawFrame(std::span<const std::uint8_t> bytes,
                    double received_at = 0.0);

  std::span<const std::uint8_t> bytes() const {
    return {data_.data(), size_};
  }
  std::size_t size() const { return size_; }
  std::size_t bit_length() const { return size_ * 8; }
  double received_at() const { return received_at_; }

  // Reads `count` (<= 32) bits starting at 1-based bit `first`, MSB first.
  std::uint32_t Bits(int first, int count) const;

  friend bool operator==(const RawFrame& a, const RawFrame& b) {
    return a.size_ == b.size_ && a.data_ == b.data_;
  }

 private:
  std::array<std::uint8_t, kLongBytes> data_{};
  std::size_t size_ = 0;
  double received_at_ = 0.0;
};

enum class CprFormat : std::uint8_t { kEven = 0, kOdd = 1 };

struct AirbornePositionMsg {
  CprFormat cpr_format = CprFormat::kEven;
  std::uint32_t cpr_lat = 0;  // 17 bits
  std::uint32_t cpr_lon = 0;  // 17 bits
  std::optional<int> altitude_ft;
  bool surface = false;

  friend bool operator==(const AirbornePositionMsg&,
                         const AirbornePositionMsg&) = default;
};

struct VelocityMsg {
  double ground_speed_kt = 0.0;
  double heading_deg = 0.0;  // [0, 360)
  int vertical_rate_fpm = 0;

  friend bool operator==(const VelocityMsg&, const VelocityMsg&) = default;
};

struct IdentificationMsg {
  std::string callsign;  // right-trimmed, [A-Z0-9 ]

  friend bool operator==(const IdentificationMsg&,
                         const IdentificationMsg&) = default;
};

struct OpaqueMsg {
  friend bool operator==(const OpaqueMsg&, const OpaqueMsg&) = default;
};

using Payload =
    std::variant<OpaqueMsg, AirbornePositionMsg, VelocityMsg, IdentificationMsg>;

struct ModeSFrame {
  int df = 0;
  int capability = 0;  // CA field of DF11/17, 0 otherwise
  int type_code = 0;   // ME type code for DF17/18, 0 otherwise
  Icao icao;
  Payload payload;
  bool crc_ok = false;
  double received_at = 0.0;
};

// Mode S CRC-24 (generator 0xFFF409) over the first n-24 bits of `bytes`.
std::uint32_t ComputeCrc(std::span<const std::uint8_t> bytes);

// True iff the remainder of the data bits equals the trailing parity field.
bool VerifyCrc(const RawFrame& raw);

ModeSFrame ParseFrame(const RawFrame& raw);

// AC12 altitude field with the Q bit at mask 0x010. Zero means "no altitude"
// and is handled by the caller; Q=0 (Gillham) throws kUndecodableAltitude.
int DecodeAltitude(std::uint32_t ac12);

// Mode S 6-bit identification alphabet; '#' marks unassigned codes.
inline constexpr std::string_view kIdentCharset =
    "#ABCDEFGHIJKLMNOPQRSTUVWXYZ##### ###############0123456789######";

}  // namespace skylisten::adsb

#endif  // SKYLISTEN_ADSB_MODES_H_
