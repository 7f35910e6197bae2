#ifndef SKYLISTEN_SIMULATE_SCENARIO_H_
#define SKYLISTEN_SIMULATE_SCENARIO_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skylisten/adsb/modes.h"
#include "skylisten/geo.h"
#include "skylisten/trigger/trigger.h"

namespace skylisten::simulate {

struct Waypoint {
  double t_s = 0.0;
  LatLon position;
  int altitude_ft = 0;
};

// One aircraft following straight segments between waypoints. A single
// waypoint means a stationary (hovering) target for the whole scenario.
struct FlightScript {
  adsb::Icao icao;
  std::vector<Waypoint> waypoints;
  double message_rate_hz = 2.0;
  bool include_velocity = false;
  bool include_identification = false;
  std::optional<std::string> callsign;

  struct Kinematics {
    LatLon position;
    double altitude_ft = 0.0;
    double ground_speed_kt = 0.0;
    double heading_deg = 0.0;
    double vertical_rate_fpm = 0.0;
  };

  // Linear interpolation; clamps outside the waypoint span.
  Kinematics At(double t_s) const;

  // Throws skylisten::Error.
  void Validate() const;
};

struct Scenario {
  std::vector<FlightScript> flights;
  LatLon device;
  double duration_s = 0.0;
  std::uint64_t seed = 0;

  void Validate() const;
};

struct TimedFrame {
  double t_s = 0.0;
  adsb::RawFrame frame;
};

// Message stream for the scenario, ordered by time. Each flight transmits
// positions at message_rate_hz with strictly alternating even/odd CPR frames
// (even first), plus a velocity frame per slot and an identification frame
// every fifth slot when enabled. The seed only sets each flight's phase
// offset within its first message period.
std::vector<TimedFrame> Emit(const Scenario& scenario);

// "t *HEX;" per line.
std::string FormatAvrStream(const std::vector<TimedFrame>& frames);

// Same schedule as Emit, as pre-decoded SBS rows "t MSG,...".
std::string EmitSbsStream(const Scenario& scenario);

struct ApproachOptions {
  adsb::Icao icao{0x7C7CD0};
  double speed_kt = 140.0;
  int altitude_ft = 1000;
  double half_length_km = 15.0;
  double message_rate_hz = 2.0;
  double start_s = 0.0;
  double tail_s = 30.0;
  std::uint64_t seed = 1;
};

// Northbound straight flyby whose closest approach to the configured device
// is `closest_km` (passing to the east).
Scenario ScriptedApproach(const trigger::TriggerConfig& config, double closest_km,
                          const ApproachOptions& options = {});

// JSON scenario files:
//   {"device": {"lat": .., "lon": ..}, "duration_s": .., "seed": ..,
//    "flights": [{"icao": "7C7CD0", "message_rate_hz": 2,
//                 "include_velocity": true, "include_identification": true,
//                 "callsign": "QFA123",
//                 "waypoints": [[t_s, lat, lon, altitude_ft], ...]}]}
Scenario ParseScenario(std::string_view json_text);
Scenario LoadScenario(const std::filesystem::path& path);
std::string FormatScenario(const Scenario& scenario);

}  // namespace skylisten::simulate

#endif  // SKYLISTEN_SIMULATE_SCENARIO_H_
