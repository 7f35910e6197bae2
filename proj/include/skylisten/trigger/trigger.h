#ifndef SKYLISTEN_TRIGGER_TRIGGER_H_
#define SKYLISTEN_TRIGGER_TRIGGER_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skylisten/adsb/modes.h"
#include "skylisten/airtrack/tracker.h"
#include "skylisten/error.h"
#include "skylisten/geo.h"
#include "skylisten/util/datetime.h"

namespace skylisten::trigger {

enum class TriggerErrc { kClockRegression, kBadConfig };
using TriggerError = CodedError<TriggerErrc>;

struct TriggerConfig {
  int location_id = 0;
  int mic_id = 0;
  LatLon device_position;
  double trigger_distance_km = 3.0;
  double silence_radius_km = 10.0;
  double aircraft_duration_s = 60.0;
  double silence_duration_s = 10.0;
  int confirmations_required = 3;
  double cooldown_s = 5.0;
  double snapshot_period_s = 1.0;

  // Throws TriggerError(kBadConfig).
  void Validate() const;
};

// Trigger radius used at each of the three published recording locations:
// 3 km at location 0, 1 km at location 1, 1.5 km at location 2.
double StandardTriggerDistanceKm(int location_id);

enum class EventClass { kSilence = 0, kAircraft = 1 };

inline constexpr std::string_view kSilenceHex = "000000";

struct RecordingEvent {
  EventClass event_class = EventClass::kSilence;
  adsb::Icao hex;  // zero for silence
  std::optional<int> altitude_ft;  // last reported before the recording
  util::CivilTime started_at;
  int location_id = 0;
  int mic_id = 0;
  double duration_s = 0.0;

  friend bool operator==(const RecordingEvent&, const RecordingEvent&) = default;
};

// {hex}_{YYYY-MM-DD}_{HH-MM-SS}_{loc}_{mic}.wav
std::string MakeFilename(const RecordingEvent& event);

enum class Mode { kIdle, kRecordingAircraft, kRecordingSilence, kCooldown };

struct TriggerState {
  Mode mode = Mode::kIdle;
  std::optional<double> recording_ends_at;
  std::optional<double> cooldown_ends_at;
  int clear_streak = 0;
  std::optional<RecordingEvent> active_event;
  std::optional<double> last_step_at;
};

enum class ActionKind {
  kStartAircraftRecording,
  kStartSilenceRecording,
  kStopRecording,
  kAbortSilenceRecording,
};

struct Action {
  ActionKind kind;
  RecordingEvent event;  // the event being started, stopped or aborted
  double at = 0.0;
};

struct StepResult {
  TriggerState state;
  std::vector<Action> actions;
};

// One tick of the recording state machine. Pure: the same inputs always give
// the same result. `wall_now` stamps events started in this step.
StepResult Step(const TriggerState& state,
                const airtrack::AirspaceSnapshot& snapshot,
                const TriggerConfig& config, double now,
                const util::CivilTime& wall_now);

std::string_view ToString(ActionKind kind);

}  // namespace skylisten::trigger

#endif  // SKYLISTEN_TRIGGER_TRIGGER_H_
