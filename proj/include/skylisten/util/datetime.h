#ifndef SKYLISTEN_UTIL_DATETIME_H_
#define SKYLISTEN_UTIL_DATETIME_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace skylisten::util {

// Broken-down UTC-agnostic wall clock. Recordings are labelled with the local
// time of the recording device; no time zone conversion happens anywhere.
struct CivilTime {
  int year = 1970;
  int month = 1;
  int day = 1;
  int hour = 0;
  int minute = 0;
  int second = 0;

  friend bool operator==(const CivilTime&, const CivilTime&) = default;
};

std::int64_t ToEpochSeconds(const CivilTime& t);
CivilTime FromEpochSeconds(std::int64_t seconds);

// Accepts "YYYY-MM-DDTHH:MM:SS" or "YYYY-MM-DD HH:MM:SS".
CivilTime ParseIsoDateTime(std::string_view text);
std::string FormatIsoDateTime(const CivilTime& t);  // YYYY-MM-DDTHH:MM:SS
std::string FormatDate(const CivilTime& t);         // YYYY-MM-DD
std::string FormatClock(const CivilTime& t);        // HH:MM:SS

}  // namespace skylisten::util

#endif  // SKYLISTEN_UTIL_DATETIME_H_
