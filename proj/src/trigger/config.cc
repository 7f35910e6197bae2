#include "skylisten/trigger/config.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace skylisten::trigger {

namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void Fail(int line_no, const std::string& why) {
  throw TriggerError(TriggerErrc::kBadConfig,
                     "config line " + std::to_string(line_no) + ": " + why);
}

template <typename T>
T ParseValue(std::string_view v, int line_no) {
  T out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    Fail(line_no, "bad value '" + std::string(v) + "'");
  }
  return out;
}

struct Pending {
  TriggerConfig config;
  bool has_lat = false;
  bool has_lon = false;
  bool has_distance = false;
  int line_no = 0;
};

void Finish(Pending& p, std::vector<TriggerConfig>& out) {
  if (!p.has_lat || !p.has_lon) Fail(p.line_no, "location block needs lat and lon");
  if (!p.has_distance) {
    try {
      p.config.trigger_distance_km = StandardTriggerDistanceKm(p.config.location_id);
    } catch (const TriggerError&) {
      Fail(p.line_no, "trigger_distance_km is required for this location");
    }
  }
  p.config.Validate();
  out.push_back(p.config);
}

}  // namespace

std::vector<TriggerConfig> ParseTriggerConfig(std::string_view text) {
  std::vector<TriggerConfig> out;
  std::optional<Pending> current;
  std::set<int> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') Fail(line_no, "unterminated section header");
      const std::string_view inner = Trim(line.substr(1, line.size() - 2));
      constexpr std::string_view kPrefix = "location";
      if (inner.substr(0, kPrefix.size()) != kPrefix) {
        Fail(line_no, "expected [location N]");
      }
      const int id = ParseValue<int>(Trim(inner.substr(kPrefix.size())), line_no);
      if (!seen.insert(id).second) Fail(line_no, "duplicate location block");
      if (current) Finish(*current, out);
      current = Pending{};
      current->config.location_id = id;
      current->line_no = line_no;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) Fail(line_no, "expected key = value");
    if (!current) Fail(line_no, "key outside a [location N] block");
    const std::string_view key = Trim(line.substr(0, eq));
    const std::string_view value = Trim(line.substr(eq + 1));
    TriggerConfig& c = current->config;
    if (key == "mic_id") {
      c.mic_id = ParseValue<int>(value, line_no);
    } else if (key == "lat") {
      c.device_position.lat_deg = ParseValue<double>(value, line_no);
      current->has_lat = true;
    } else if (key == "lon") {
      c.device_position.lon_deg = ParseValue<double>(value, line_no);
      current->has_lon = true;
    } else if (key == "trigger_distance_km") {
      c.trigger_distance_km = ParseValue<double>(value, line_no);
      current->has_distance = true;
    } else if (key == "silence_radius_km") {
      c.silence_radius_km = ParseValue<double>(value, line_no);
    } else if (key == "confirmations_required") {
      c.confirmations_required = ParseValue<int>(value, line_no);
    } else if (key == "snapshot_period_s") {
      c.snapshot_period_s = ParseValue<double>(value, line_no);
    } else if (key == "cooldown_s") {
      c.cooldown_s = ParseValue<double>(value, line_no);
    } else if (key == "aircraft_duration_s") {
      c.aircraft_duration_s = ParseValue<double>(value, line_no);
    } else if (key == "silence_duration_s") {
      c.silence_duration_s = ParseValue<double>(value, line_no);
    } else {
      Fail(line_no, "unknown key '" + std::string(key) + "'");
    }
  }
  if (current) Finish(*current, out);
  if (out.empty()) {
    throw TriggerError(TriggerErrc::kBadConfig, "config has no location blocks");
  }
  return out;
}

std::vector<TriggerConfig> LoadTriggerConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw TriggerError(TriggerErrc::kBadConfig,
                       "cannot read config " + path.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseTriggerConfig(ss.str());
}

std::string FormatTriggerConfig(const std::vector<TriggerConfig>& configs) {
  std::string out;
  char buf[256];
  for (const auto& c : configs) {
    std::snprintf(buf, sizeof buf, "[location %d]\n", c.location_id);
    out += buf;
    std::snprintf(buf, sizeof buf, "mic_id = %d\nlat = %.7f\nlon = %.7f\n",
                  c.mic_id, c.device_position.lat_deg, c.device_position.lon_deg);
    out += buf;
    std::snprintf(buf, sizeof buf,
                  "trigger_distance_km = %g\nsilence_radius_km = %g\n"
                  "confirmations_required = %d\n",
                  c.trigger_distance_km, c.silence_radius_km,
                  c.confirmations_required);
    out += buf;
    std::snprintf(buf, sizeof buf,
                  "snapshot_period_s = %g\ncooldown_s = %g\n"
                  "aircraft_duration_s = %g\nsilence_duration_s = %g\n\n",
                  c.snapshot_period_s, c.cooldown_s, c.aircraft_duration_s,
                  c.silence_duration_s);
    out += buf;
  }
  return out;
}

const TriggerConfig& FindLocation(const std::vector<TriggerConfig>& configs,
                                  int location_id) {
  for (const auto& c : configs) {
    if (c.location_id == location_id) return c;
  }
  throw TriggerError(TriggerErrc::kBadConfig,
                     "no config block for location " + std::to_string(location_id));
}

}  // namespace skylisten::trigger
