#ifndef SKYLISTEN_TRIGGER_CONFIG_H_
#define SKYLISTEN_TRIGGER_CONFIG_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "skylisten/trigger/trigger.h"

namespace skylisten::trigger {

// Key-value config with one block per recording location:
//
//   # comments start with '#'
//   [location 0]
//   mic_id = 1
//   lat = -34.9500
//   lon = 138.5300
//   trigger_distance_km = 3.0     # defaults to the standard for 0..2
//   silence_radius_km = 10.0
//   confirmations_required = 3
//   snapshot_period_s = 1.0
//   cooldown_s = 5.0
//   aircraft_duration_s = 60      # optional
//   silence_duration_s = 10       # optional
//
// lat and lon are required. Throws TriggerError(kBadConfig) with the line
// number on any unknown key, duplicate block or malformed value.
std::vector<TriggerConfig> ParseTriggerConfig(std::string_view text);
std::vector<TriggerConfig> LoadTriggerConfig(const std::filesystem::path& path);

std::string FormatTriggerConfig(const std::vector<TriggerConfig>& configs);

const TriggerConfig& FindLocation(const std::vector<TriggerConfig>& configs,
                                  int location_id);

}  // namespace skylisten::trigger

#endif  // SKYLISTEN_TRIGGER_CONFIG_H_
