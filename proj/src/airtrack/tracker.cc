#include "skylisten/airtrack/tracker.h"

#include "skylisten/airtrack/geo.h"

namespace skylisten::airtrack {

Tracker::Tracker(TrackerConfig config) : config_(std::move(config)) {}

std::pair<AircraftState*, bool> Tracker::Touch(adsb::Icao icao, double now,
                                               IngestReport& report) {
  auto [it, inserted] = table_.try_emplace(icao);
  AircraftState& state = it->second;
  if (inserted) {
    state.icao = icao;
    state.last_seen = now;
    report.created = true;
  } else if (now < state.last_seen) {
    report.out_of_order = true;
  } else {
    state.last_seen = now;
  }
  return {&state, inserted};
}

void Tracker::UpdatePosition(AircraftState& state,
                             const adsb::AirbornePositionMsg& msg, double now,
                             IngestReport& report) {
  const adsb::TimedPosition timed{msg, now};
  const bool odd = msg.cpr_format == adsb::CprFormat::kOdd;
  (odd ? state.last_odd : state.last_even) = timed;
  const auto& other = odd ? state.last_even : state.last_odd;

  std::optional<LatLon> decoded;
  try {
    if (other && now - other->received_at <= config_.pairing_window_s) {
      decoded = odd ? adsb::DecodeCprGlobal(*other, timed,
                                            config_.pairing_window_s)
                    : adsb::DecodeCprGlobal(timed, *other,
                                            config_.pairing_window_s);
    } else if (state.position &&
               now - state.position_time <= config_.stale_timeout_s) {
      decoded = adsb::DecodeCprLocal(msg, *state.position);
    } else if (config_.receiver) {
      decoded = adsb::DecodeCprLocal(msg, *config_.receiver);
    }
  } catch (const adsb::AdsbError& e) {
    report.decode_error = e.what();
  }
  if (decoded) {
    state.position = decoded;
    state.position_time = now;
    report.position_updated = true;
  }
}

IngestReport Tracker::Ingest(const adsb::ModeSFrame& frame, double now) {
  IngestReport report;
  report.icao = frame.icao;
  if (!frame.crc_ok) {
    report.dropped = true;
    return report;
  }
  auto [state, created] = Touch(frame.icao, now, report);
  if (report.out_of_order) return report;

  if (frame.df == 17 || frame.df == 18 || frame.df == 11) {
    if (frame.capability == 4) state->airborne = false;
    if (frame.capability == 5) state->airborne = true;
  }
  if (frame.type_code >= 5 && frame.type_code <= 8) state->airborne = false;

  if (const auto* pos = std::get_if<adsb::AirbornePositionMsg>(&frame.payload)) {
    state->airborne = !pos->surface;
    if (pos->altitude_ft) state->altitude_ft = pos->altitude_ft;
    UpdatePosition(*state, *pos, now, report);
  } else if (const auto* vel = std::get_if<adsb::VelocityMsg>(&frame.payload)) {
    state->ground_speed_kt = vel->ground_speed_kt;
    state->heading_deg = vel->heading_deg;
    state->vertical_rate_fpm = vel->vertical_rate_fpm;
  } else if (const auto* id =
                 std::get_if<adsb::IdentificationMsg>(&frame.payload)) {
    state->callsign = id->callsign;
  }
  return report;
}

IngestReport Tracker::Ingest(const adsb::SbsMessage& msg, double now) {
  IngestReport report;
  report.icao = msg.icao;
  auto [state, created] = Touch(msg.icao, now, report);
  if (report.out_of_order) return report;

  if (msg.on_ground) state->airborne = !*msg.on_ground;
  if (msg.callsign) state->callsign = msg.callsign;
  if (msg.altitude_ft) state->altitude_ft = msg.altitude_ft;
  if (msg.ground_speed_kt) state->ground_speed_kt = msg.ground_speed_kt;
  if (msg.track_deg) state->heading_deg = msg.track_deg;
  if (msg.vertical_rate_fpm) state->vertical_rate_fpm = msg.vertical_rate_fpm;
  if (msg.position) {
    state->position = msg.position;
    state->position_time = now;
    report.position_updated = true;
  }
  return report;
}

std::size_t Tracker::Prune(double now) {
  return std::erase_if(table_, [&](const auto& entry) {
    return now - entry.second.last_seen > config_.stale_timeout_s;
  });
}

AirspaceSnapshot Tracker::Snapshot(double now) {
  Prune(now);
  std::vector<AircraftState> copy;
  copy.reserve(table_.size());
  for (const auto& [icao, state] : table_) copy.push_back(state);
  return AirspaceSnapshot(now, std::move(copy));
}

const AircraftState* Tracker::Find(adsb::Icao icao) const {
  const auto it = table_.find(icao);
  return it == table_.end() ? nullptr : &it->second;
}

std::optional<NearestAircraft> NearestAirborne(const AirspaceSnapshot& snapshot,
                                               LatLon device) {
  std::optional<NearestAircraft> best;
  for (const AircraftState& a : snapshot.aircraft()) {
    if (!a.airborne || !a.position) continue;
    const double d = HaversineKm(device, *a.position);
    if (!best || d < best->distance_km ||
        (d == best->distance_km && a.icao < best->icao)) {
      best = NearestAircraft{a.icao, d, a.altitude_ft};
    }
  }
  return best;
}

}  // namespace skylisten::airtrack
