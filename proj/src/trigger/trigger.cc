#include "skylisten/trigger/trigger.h"

#include <cstdio>

#include "skylisten/airtrack/geo.h"

namespace skylisten::trigger {

namespace {

bool AnyAirborneWithin(const airtrack::AirspaceSnapshot& snapshot,
                       LatLon device, double radius_km) {
  for (const auto& a : snapshot.aircraft()) {
    if (a.airborne && a.position &&
        airtrack::HaversineKm(device, *a.position) <= radius_km) {
      return true;
    }
  }
  return false;
}

void EnterCooldown(TriggerState& s, const TriggerConfig& config, double now) {
  s.mode = Mode::kCooldown;
  s.recording_ends_at.reset();
  s.active_event.reset();
  s.cooldown_ends_at = now + config.cooldown_s;
}

}  // namespace

void TriggerConfig::Validate() const {
  auto fail = [](const std::string& why) {
    throw TriggerError(TriggerErrc::kBadConfig, "trigger config: " + why);
  };
  if (!(trigger_distance_km > 0.0)) fail("trigger_distance_km must be positive");
  if (!(silence_radius_km > trigger_distance_km)) {
    fail("silence_radius_km must exceed trigger_distance_km");
  }
  if (!(aircraft_duration_s > 0.0) || !(silence_duration_s > 0.0)) {
    fail("durations must be positive");
  }
  if (confirmations_required < 1) fail("confirmations_required must be >= 1");
  if (!(cooldown_s >= 0.0)) fail("cooldown_s must be non-negative");
  if (!(snapshot_period_s > 0.0)) fail("snapshot_period_s must be positive");
  if (location_id < 0 || mic_id < 0) fail("ids must be non-negative");
  if (device_position.lat_deg < -90.0 || device_position.lat_deg > 90.0 ||
      device_position.lon_deg < -180.0 || device_position.lon_deg > 180.0) {
    fail("device position out of range");
  }
}

double StandardTriggerDistanceKm(int location_id) {
  switch (location_id) {
    case 0:
      return 3.0;
    case 1:
      return 1.0;
    case 2:
      return 1.5;
    default:
      throw TriggerError(TriggerErrc::kBadConfig,
                         "no standard trigger distance for location " +
                             std::to_string(location_id));
  }
}

std::string MakeFilename(const RecordingEvent& event) {
  const std::string hex = event.event_class == EventClass::kSilence
                              ? std::string(kSilenceHex)
                              : event.hex.hex();
  const auto& t = event.started_at;
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s_%04d-%02d-%02d_%02d-%02d-%02d_%d_%d.wav",
                hex.c_str(), t.year, t.month, t.day, t.hour, t.minute, t.second,
                event.location_id, event.mic_id);
  return buf;
}

StepResult Step(const TriggerState& state,
                const airtrack::AirspaceSnapshot& snapshot,
                const TriggerConfig& config, double now,
                const util::CivilTime& wall_now) {
  if (state.last_step_at && now < *state.last_step_at) {
    throw TriggerError(TriggerErrc::kClockRegression,
                       "snapshot clock went backwards");
  }
  StepResult out{state, {}};
  TriggerState& s = out.state;
  s.last_step_at = now;

  const bool contaminated =
      AnyAirborneWithin(snapshot, config.device_position, config.silence_radius_km);
  s.clear_streak = contaminated ? 0 : s.clear_streak + 1;

  switch (s.mode) {
    case Mode::kRecordingSilence:
      if (contaminated) {
        out.actions.push_back({ActionKind::kAbortSilenceRecording, *s.active_event, now});
        EnterCooldown(s, config, now);
      } else if (now >= *s.recording_ends_at) {
        out.actions.push_back({ActionKind::kStopRecording, *s.active_event, now});
        EnterCooldown(s, config, now);
      }
      break;
    case Mode::kRecordingAircraft:
      // Runs to completion whatever the traffic does.
      if (now >= *s.recording_ends_at) {
        out.actions.push_back({ActionKind::kStopRecording, *s.active_event, now});
        EnterCooldown(s, config, now);
      }
      break;
    case Mode::kIdle:
    case Mode::kCooldown:
      break;
  }
  if (s.mode == Mode::kCooldown && now >= *s.cooldown_ends_at) {
    s.mode = Mode::kIdle;
    s.cooldown_ends_at.reset();
  }
  if (s.mode != Mode::kIdle) return out;

  RecordingEvent event;
  event.started_at = wall_now;
  event.location_id = config.location_id;
  event.mic_id = config.mic_id;

  const auto nearest = airtrack::NearestAirborne(snapshot, config.device_position);
  if (nearest && nearest->altitude_ft &&
      nearest->distance_km <= config.trigger_distance_km) {
    event.event_class = EventClass::kAircraft;
    event.hex = nearest->icao;
    event.altitude_ft = nearest->altitude_ft;
    event.duration_s = config.aircraft_duration_s;
    s.mode = Mode::kRecordingAircraft;
    s.recording_ends_at = now + config.aircraft_duration_s;
    s.active_event = event;
    out.actions.push_back({ActionKind::kStartAircraftRecording, event, now});
  } else if (s.clear_streak >= config.confirmations_required) {
    event.event_class = EventClass::kSilence;
    event.duration_s = config.silence_duration_s;
    s.mode = Mode::kRecordingSilence;
    s.recording_ends_at = now + config.silence_duration_s;
    s.active_event = event;
    out.actions.push_back({ActionKind::kStartSilenceRecording, event, now});
  }
  return out;
}

std::string_view ToString(ActionKind kind) {
  switch (kind) {
    case ActionKind::kStartAircraftRecording:
      return "start_aircraft";
    case ActionKind::kStartSilenceRecording:
      return "start_silence";
    case ActionKind::kStopRecording:
      return "stop";
    case ActionKind::kAbortSilenceRecording:
      return "abort_silence";
  }
  return "?";
}

}  // namespace skylisten::trigger
