#ifndef SKYLISTEN_AIRTRACK_TRACKER_H_
#define SKYLISTEN_AIRTRACK_TRACKER_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "skylisten/adsb/cpr.h"
#include "skylisten/adsb/modes.h"
#include "skylisten/adsb/stream.h"
#include "skylisten/geo.h"

namespace skylisten::airtrack {

struct TrackerConfig {
  double stale_timeout_s = 60.0;
  double pairing_window_s = adsb::kDefaultPairingWindowS;
  // Enables single-frame local decode for aircraft without a track yet.
  // Must be within ~180 NM of every aircraft that can be heard.
  std::optional<LatLon> receiver;
};

struct AircraftState {
  adsb::Icao icao;
  std::optional<LatLon> position;
  double position_time = 0.0;
  std::optional<int> altitude_ft;
  bool airborne = true;
  std::optional<std::string> callsign;
  std::optional<double> ground_speed_kt;
  std::optional<double> heading_deg;
  std::optional<int> vertical_rate_fpm;
  double last_seen = 0.0;
  std::optional<adsb::TimedPosition> last_even;
  std::optional<adsb::TimedPosition> last_odd;
};

struct IngestReport {
  adsb::Icao icao;
  bool created = false;
  bool position_updated = false;
  bool out_of_order = false;
  bool dropped = false;  // CRC failure; the table is untouched
  std::optional<std::string> decode_error;
};

// Point-in-time copy of the table. Never mutated after construction.
class AirspaceSnapshot {
 public:
  AirspaceSnapshot(double taken_at, std::vector<AircraftState> aircraft)
      : taken_at_(taken_at), aircraft_(std::move(aircraft)) {}

  double taken_at() const { return taken_at_; }
  const std::vector<AircraftState>& aircraft() const { return aircraft_; }

 private:
  double taken_at_;
  std::vector<AircraftState> aircraft_;
};

struct NearestAircraft {
  adsb::Icao icao;
  double distance_km = 0.0;
  std::optional<int> altitude_ft;
};

// Live aircraft table. Single writer; snapshots are independent copies.
class Tracker {
 public:
  explicit Tracker(TrackerConfig config = {});

  // Frames whose CRC failed are reported as dropped and otherwise ignored.
  // A frame older than the aircraft's last_seen is reported out of order and
  // its payload discarded so replayed logs cannot rewind a track.
  IngestReport Ingest(const adsb::ModeSFrame& frame, double now);

  // Pre-decoded SBS rows bypass CPR.
  IngestReport Ingest(const adsb::SbsMessage& msg, double now);

  // Removes aircraft with now - last_seen > stale_timeout_s.
  std::size_t Prune(double now);

  AirspaceSnapshot Snapshot(double now);

  std::size_t size() const { return table_.size(); }
  const AircraftState* Find(adsb::Icao icao) const;
  const TrackerConfig& config() const { return config_; }

 private:
  // Returns the state and whether it was just created.
  std::pair<AircraftState*, bool> Touch(adsb::Icao icao, double now,
                                        IngestReport& report);
  void UpdatePosition(AircraftState& state, const adsb::AirbornePositionMsg& msg,
                      double now, IngestReport& report);

  TrackerConfig config_;
  std::map<adsb::Icao, AircraftState> table_;
};

// Closest airborne aircraft with a known position; ties go to the
// lexicographically smaller ICAO address.
std::optional<NearestAircraft> NearestAirborne(const AirspaceSnapshot& snapshot,
                                               LatLon device);

}  // namespace skylisten::airtrack

#endif  // SKYLISTEN_AIRTRACK_TRACKER_H_
