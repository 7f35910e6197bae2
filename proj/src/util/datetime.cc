#include "skylisten/util/datetime.h"

#include <chrono>
#include <cstdio>

#include "skylisten/error.h"

namespace skylisten::util {

namespace {

bool ParseFixed(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

}  // namespace

std::int64_t ToEpochSeconds(const CivilTime& t) {
  using namespace std::chrono;
  const year_month_day ymd{year{t.year}, month{static_cast<unsigned>(t.month)},
                           day{static_cast<unsigned>(t.day)}};
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<std::int64_t>(days) * 86400 + t.hour * 3600 +
         t.minute * 60 + t.second;
}

CivilTime FromEpochSeconds(std::int64_t seconds) {
  using namespace std::chrono;
  std::int64_t days = seconds / 86400;
  std::int64_t rem = seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  CivilTime t;
  t.year = static_cast<int>(ymd.year());
  t.month = static_cast<int>(static_cast<unsigned>(ymd.month()));
  t.day = static_cast<int>(static_cast<unsigned>(ymd.day()));
  t.hour = static_cast<int>(rem / 3600);
  t.minute = static_cast<int>((rem % 3600) / 60);
  t.second = static_cast<int>(rem % 60);
  return t;
}

CivilTime ParseIsoDateTime(std::string_view text) {
  CivilTime t;
  const bool ok = text.size() == 19 && ParseFixed(text, 0, 4, t.year) &&
                  text[4] == '-' && ParseFixed(text, 5, 2, t.month) &&
                  text[7] == '-' && ParseFixed(text, 8, 2, t.day) &&
                  (text[10] == 'T' || text[10] == ' ') &&
                  ParseFixed(text, 11, 2, t.hour) && text[13] == ':' &&
                  ParseFixed(text, 14, 2, t.minute) && text[16] == ':' &&
                  ParseFixed(text, 17, 2, t.second);
  if (!ok || t.month < 1 || t.month > 12 || t.day < 1 || t.day > 31 ||
      t.hour > 23 || t.minute > 59 || t.second > 59) {
    throw Error("bad datetime '" + std::string(text) +
                "', expected YYYY-MM-DDTHH:MM:SS");
  }
  if (!std::chrono::year_month_day{std::chrono::year{t.year},
                                   std::chrono::month(t.month),
                                   std::chrono::day(t.day)}
           .ok()) {
    throw Error("bad calendar date '" + std::string(text) + "'");
  }
  return t;
}

std::string FormatIsoDateTime(const CivilTime& t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d", t.year,
                t.month, t.day, t.hour, t.minute, t.second);
  return buf;
}

std::string FormatDate(const CivilTime& t) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", t.year, t.month, t.day);
  return buf;
}

std::string FormatClock(const CivilTime& t) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", t.hour, t.minute, t.second);
  return buf;
}

}  // namespace skylisten::util
