#include "skylisten/simulate/scenario.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "skylisten/adsb/stream.h"
#include "skylisten/airtrack/geo.h"
#include "skylisten/simulate/encoder.h"

namespace skylisten::simulate {

namespace {

constexpr double kKmPerDegLat = airtrack::kEarthRadiusKm * M_PI / 180.0;
constexpr double kKmPerNm = 1.852;

enum class Kind { kPosition = 0, kVelocity = 1, kIdentification = 2 };

struct Slot {
  double t_s;
  std::size_t flight;
  Kind kind;
  int index;
};

std::vector<Slot> Schedule(const Scenario& scenario) {
  std::mt19937_64 rng(scenario.seed);
  std::vector<Slot> slots;
  for (std::size_t f = 0; f < scenario.flights.size(); ++f) {
    const FlightScript& flight = scenario.flights[f];
    const double period = 1.0 / flight.message_rate_hz;
    const double phase =
        std::uniform_real_distribution<double>(0.0, 0.5 * period)(rng);
    const double start = flight.waypoints.front().t_s;
    const double end = flight.waypoints.size() == 1
                           ? scenario.duration_s
                           : std::min(flight.waypoints.back().t_s, scenario.duration_s);
    for (int k = 0;; ++k) {
      const double t = start + phase + k * period;
      if (t >= end) break;
      slots.push_back({t, f, Kind::kPosition, k});
      if (flight.include_velocity) slots.push_back({t, f, Kind::kVelocity, k});
      if (flight.include_identification && flight.callsign && k % 5 == 0) {
        slots.push_back({t, f, Kind::kIdentification, k});
      }
    }
  }
  std::stable_sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) {
    if (a.t_s != b.t_s) return a.t_s < b.t_s;
    if (a.flight != b.flight) return a.flight < b.flight;
    return a.kind < b.kind;
  });
  return slots;
}

int RoundTo25(double altitude_ft) {
  return static_cast<int>(std::lround(altitude_ft / 25.0)) * 25;
}

}  // namespace

FlightScript::Kinematics FlightScript::At(double t_s) const {
  Kinematics k;
  if (waypoints.size() == 1 || t_s <= waypoints.front().t_s) {
    const Waypoint& w = waypoints.front();
    k.position = w.position;
    k.altitude_ft = w.altitude_ft;
    if (waypoints.size() == 1) return k;
  }
  if (t_s >= waypoints.back().t_s) {
    const Waypoint& w = waypoints.back();
    k.position = w.position;
    k.altitude_ft = w.altitude_ft;
    return k;
  }
  std::size_t i = 0;
  while (i + 2 < waypoints.size() && waypoints[i + 1].t_s <= t_s) ++i;
  const Waypoint& a = waypoints[i];
  const Waypoint& b = waypoints[i + 1];
  const double dt = b.t_s - a.t_s;
  const double u = std::clamp((t_s - a.t_s) / dt, 0.0, 1.0);
  k.position = {a.position.lat_deg + u * (b.position.lat_deg - a.position.lat_deg),
                a.position.lon_deg + u * (b.position.lon_deg - a.position.lon_deg)};
  k.altitude_ft = a.altitude_ft + u * (b.altitude_ft - a.altitude_ft);

  const double north_km = (b.position.lat_deg - a.position.lat_deg) * kKmPerDegLat;
  const double east_km = (b.position.lon_deg - a.position.lon_deg) * kKmPerDegLat *
                         std::cos(k.position.lat_deg * M_PI / 180.0);
  k.ground_speed_kt = std::hypot(north_km, east_km) / kKmPerNm / dt * 3600.0;
  double heading = std::atan2(east_km, north_km) * 180.0 / M_PI;
  if (heading < 0.0) heading += 360.0;
  k.heading_deg = heading;
  k.vertical_rate_fpm = (b.altitude_ft - a.altitude_ft) / dt * 60.0;
  return k;
}

void FlightScript::Validate() const {
  if (waypoints.empty()) throw Error("flight " + icao.hex() + " has no waypoints");
  if (!(message_rate_hz > 0.0)) throw Error("message_rate_hz must be positive");
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    const Waypoint& w = waypoints[i];
    if (i > 0 && !(w.t_s > waypoints[i - 1].t_s)) {
      throw Error("waypoint times must be strictly increasing");
    }
    if (w.altitude_ft < -1000 || w.altitude_ft > 50175) {
      throw Error("waypoint altitude outside [-1000, 50175] ft");
    }
    if (std::fabs(w.position.lat_deg) >= 87.0) {
      throw Error("waypoint latitude must be within +/-87 degrees");
    }
  }
  if (include_identification && callsign) EncodeIdentification(icao, *callsign);
}

void Scenario::Validate() const {
  if (!(duration_s > 0.0)) throw Error("scenario duration must be positive");
  for (const auto& f : flights) {
    f.Validate();
    if (f.waypoints.back().t_s > duration_s) {
      throw Error("scenario duration does not cover flight " + f.icao.hex());
    }
  }
}

std::vector<TimedFrame> Emit(const Scenario& scenario) {
  scenario.Validate();
  std::vector<TimedFrame> out;
  for (const Slot& slot : Schedule(scenario)) {
    const FlightScript& flight = scenario.flights[slot.flight];
    const auto k = flight.At(slot.t_s);
    switch (slot.kind) {
      case Kind::kPosition:
        out.push_back({slot.t_s, EncodeAirbornePosition(
                                     flight.icao, k.position.lat_deg,
                                     k.position.lon_deg, RoundTo25(k.altitude_ft),
                                     slot.index % 2 ? adsb::CprFormat::kOdd
                                                    : adsb::CprFormat::kEven,
                                     slot.t_s)});
        break;
      case Kind::kVelocity:
        out.push_back({slot.t_s, EncodeVelocity(flight.icao, k.ground_speed_kt,
                                                k.heading_deg,
                                                static_cast<int>(std::lround(k.vertical_rate_fpm)),
                                                slot.t_s)});
        break;
      case Kind::kIdentification:
        out.push_back({slot.t_s, EncodeIdentification(flight.icao, *flight.callsign,
                                                       slot.t_s)});
        break;
    }
  }
  return out;
}

std::string FormatAvrStream(const std::vector<TimedFrame>& frames) {
  std::string out;
  for (const auto& f : frames) {
    out += adsb::FormatTimedAvr(f.t_s, f.frame);
    out += '\n';
  }
  return out;
}

std::string EmitSbsStream(const Scenario& scenario) {
  scenario.Validate();
  std::string out;
  char prefix[32];
  for (const Slot& slot : Schedule(scenario)) {
    const FlightScript& flight = scenario.flights[slot.flight];
    const auto k = flight.At(slot.t_s);
    adsb::SbsMessage msg;
    msg.icao = flight.icao;
    switch (slot.kind) {
      case Kind::kPosition:
        msg.transmission_type = 3;
        msg.altitude_ft = RoundTo25(k.altitude_ft);
        msg.position = k.position;
        msg.on_ground = false;
        break;
      case Kind::kVelocity:
        msg.transmission_type = 4;
        msg.ground_speed_kt = k.ground_speed_kt;
        msg.track_deg = k.heading_deg;
        msg.vertical_rate_fpm = static_cast<int>(std::lround(k.vertical_rate_fpm));
        break;
      case Kind::kIdentification:
        msg.transmission_type = 1;
        msg.callsign = *flight.callsign;
        break;
    }
    std::snprintf(prefix, sizeof prefix, "%.3f ", slot.t_s);
    out += prefix;
    out += adsb::FormatSbsLine(msg);
    out += '\n';
  }
  return out;
}

Scenario ScriptedApproach(const trigger::TriggerConfig& config, double closest_km,
                          const ApproachOptions& options) {
  if (closest_km < 0.0) throw Error("closest_km must be non-negative");
  const LatLon device = config.device_position;
  const double lat_rad = device.lat_deg * M_PI / 180.0;
  // Longitude offset whose great-circle distance along the parallel is
  // exactly closest_km.
  const double dlon =
      2.0 * std::asin(std::sin(closest_km / (2.0 * airtrack::kEarthRadiusKm)) /
                      std::cos(lat_rad)) * 180.0 / M_PI;
  const double dlat = options.half_length_km / kKmPerDegLat;
  const double speed_kmps = options.speed_kt * kKmPerNm / 3600.0;
  const double t0 = options.start_s;
  const double t1 = t0 + 2.0 * options.half_length_km / speed_kmps;

  FlightScript flight;
  flight.icao = options.icao;
  flight.message_rate_hz = options.message_rate_hz;
  flight.include_velocity = true;
  flight.include_identification = true;
  flight.callsign = "SIM" + options.icao.hex().substr(3);
  flight.waypoints = {
      {t0, {device.lat_deg - dlat, device.lon_deg + dlon}, options.altitude_ft},
      {t1, {device.lat_deg + dlat, device.lon_deg + dlon}, options.altitude_ft}};

  Scenario s;
  s.device = device;
  s.flights.push_back(std::move(flight));
  s.duration_s = t1 + options.tail_s;
  s.seed = options.seed;
  return s;
}

Scenario ParseScenario(std::string_view json_text) {
  using nlohmann::json;
  Scenario s;
  try {
    const json j = json::parse(json_text);
    s.device = {j.at("device").at("lat").get<double>(),
                j.at("device").at("lon").get<double>()};
    s.duration_s = j.at("duration_s").get<double>();
    s.seed = j.value("seed", std::uint64_t{0});
    for (const json& jf : j.at("flights")) {
      FlightScript f;
      f.icao = adsb::Icao::FromHex(jf.at("icao").get<std::string>());
      f.message_rate_hz = jf.value("message_rate_hz", 2.0);
      f.include_velocity = jf.value("include_velocity", false);
      f.include_identification = jf.value("include_identification", false);
      if (jf.contains("callsign")) f.callsign = jf.at("callsign").get<std::string>();
      for (const json& w : jf.at("waypoints")) {
        if (!w.is_array() || w.size() != 4) {
          throw Error("waypoint must be [t_s, lat, lon, altitude_ft]");
        }
        f.waypoints.push_back({w[0].get<double>(),
                               {w[1].get<double>(), w[2].get<double>()},
                               w[3].get<int>()});
      }
      s.flights.push_back(std::move(f));
    }
  } catch (const json::exception& e) {
    throw Error(std::string("scenario: ") + e.what());
  } catch (const adsb::AdsbError& e) {
    throw Error(std::string("scenario: ") + e.what());
  }
  s.Validate();
  return s;
}

Scenario LoadScenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read scenario " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseScenario(ss.str());
}

std::string FormatScenario(const Scenario& scenario) {
  using nlohmann::json;
  json j;
  j["device"] = {{"lat", scenario.device.lat_deg}, {"lon", scenario.device.lon_deg}};
  j["duration_s"] = scenario.duration_s;
  j["seed"] = scenario.seed;
  j["flights"] = json::array();
  for (const auto& f : scenario.flights) {
    json jf;
    jf["icao"] = f.icao.hex();
    jf["message_rate_hz"] = f.message_rate_hz;
    jf["include_velocity"] = f.include_velocity;
    jf["include_identification"] = f.include_identification;
    if (f.callsign) jf["callsign"] = *f.callsign;
    jf["waypoints"] = json::array();
    for (const auto& w : f.waypoints) {
      jf["waypoints"].push_back(
          {w.t_s, w.position.lat_deg, w.position.lon_deg, w.altitude_ft});
    }
    j["flights"].push_back(std::move(jf));
  }
  return j.dump(2) + "\n";
}

}  // namespace skylisten::simulate
