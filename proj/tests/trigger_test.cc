#include <cmath>
#include <random>
#include <regex>
#include <string>
#include <vector>

#include "doctest.h"
#include "skylisten/adsb/modes.h"
#include "skylisten/airtrack/geo.h"
#include "skylisten/simulate/scenario.h"
#include "skylisten/trigger/config.h"
#include "skylisten/trigger/monitor.h"
#include "skylisten/trigger/trigger.h"

using namespace skylisten;
using trigger::ActionKind;

namespace {

const LatLon kDevice{-34.95, 138.53};

trigger::TriggerConfig Location0() {
  trigger::TriggerConfig c;
  c.location_id = 0;
  c.mic_id = 1;
  c.device_position = kDevice;
  c.trigger_distance_km = 3.0;
  return c;
}

LatLon EastOf(LatLon origin, double km) {
  const double dlon = 2.0 * std::asin(std::sin(km / (2.0 * airtrack::kEarthRadiusKm)) /
                                      std::cos(origin.lat_deg * M_PI / 180.0));
  return {origin.lat_deg, origin.lon_deg + dlon * 180.0 / M_PI};
}

airtrack::AirspaceSnapshot With(double t, std::vector<std::pair<double, std::uint32_t>> at_km) {
  std::vector<airtrack::AircraftState> states;
  for (auto [km, icao] : at_km) {
    airtrack::AircraftState s;
    s.icao = adsb::Icao(icao);
    s.position = EastOf(kDevice, km);
    s.altitude_ft = 1500;
    s.airborne = true;
    states.push_back(s);
  }
  return airtrack::AirspaceSnapshot(t, std::move(states));
}

const util::CivilTime kWall{2023, 5, 9, 12, 30, 55};

struct Transcript {
  std::vector<std::pair<double, ActionKind>> actions;
  std::vector<trigger::Action> full;
};

Transcript RunReplay(const simulate::Scenario& scenario, const trigger::TriggerConfig& cfg) {
  Transcript out;
  trigger::MonitorLoop loop(cfg, {}, kWall, [&](const trigger::Action& a) {
    out.actions.emplace_back(a.at, a.kind);
    out.full.push_back(a);
  });
  for (const auto& tf : simulate::Emit(scenario)) loop.OnFrame(adsb::ParseFrame(tf.frame), tf.t_s);
  loop.Finish(scenario.duration_s);
  return out;
}

int Count(const Transcript& t, ActionKind k) {
  int n = 0;
  for (auto& [at, kind] : t.actions) n += kind == k;
  return n;
}

}  // namespace

TEST_CASE("filenames follow the published convention") {
  trigger::RecordingEvent aircraft;
  aircraft.event_class = trigger::EventClass::kAircraft;
  aircraft.hex = adsb::Icao(0x7C7CD0);
  aircraft.altitude_ft = 3250;
  aircraft.started_at = {2023, 5, 9, 12, 42, 55};
  aircraft.location_id = 2;
  aircraft.mic_id = 1;
  CHECK(trigger::MakeFilename(aircraft) == "7C7CD0_2023-05-09_12-42-55_2_1.wav");

  trigger::RecordingEvent silence = aircraft;
  silence.event_class = trigger::EventClass::kSilence;
  silence.hex = adsb::Icao();
  silence.altitude_ft.reset();
  silence.started_at = {2023, 5, 9, 12, 30, 55};
  CHECK(trigger::MakeFilename(silence) == "000000_2023-05-09_12-30-55_2_1.wav");

  const std::regex pattern(R"(^[0-9A-F]{6}_\d{4}-\d{2}-\d{2}_\d{2}-\d{2}-\d{2}_\d+_\d+\.wav$)");
  std::mt19937 rng(5);
  for (int i = 0; i < 200; ++i) {
    trigger::RecordingEvent e;
    e.event_class = i % 2 ? trigger::EventClass::kAircraft : trigger::EventClass::kSilence;
    e.hex = adsb::Icao(rng());
    e.started_at = util::FromEpochSeconds(1600000000 + static_cast<std::int64_t>(rng() % 100000000));
    e.location_id = static_cast<int>(rng() % 12);
    e.mic_id = static_cast<int>(rng() % 3);
    CHECK(std::regex_match(trigger::MakeFilename(e), pattern));
  }
}

TEST_CASE("proximity rule at the 3 km location-0 radius") {
  const auto cfg = Location0();
  SUBCASE("2.9 km starts an aircraft recording") {
    const auto r = trigger::Step({}, With(0, {{2.9, 0x7C7CD0}}), cfg, 0, kWall);
    REQUIRE(r.actions.size() == 1);
    CHECK(r.actions[0].kind == ActionKind::kStartAircraftRecording);
    CHECK(r.actions[0].event.hex == adsb::Icao(0x7C7CD0));
    CHECK(r.actions[0].event.altitude_ft == 1500);
    CHECK(r.state.mode == trigger::Mode::kRecordingAircraft);
    CHECK(*r.state.recording_ends_at == 60.0);
  }
  SUBCASE("3.1 km does nothing") {
    const auto r = trigger::Step({}, With(0, {{3.1, 0x7C7CD0}}), cfg, 0, kWall);
    CHECK(r.actions.empty());
    CHECK(r.state.mode == trigger::Mode::kIdle);
    CHECK(r.state.clear_streak == 0);
  }
  SUBCASE("the nearest of several aircraft labels the recording") {
    const auto r = trigger::Step({}, With(0, {{2.5, 0xBBBBBB}, {1.0, 0xCCCCCC}}), cfg, 0, kWall);
    CHECK(r.actions.at(0).event.hex == adsb::Icao(0xCCCCCC));
  }
}

TEST_CASE("empty airspace confirmed three times starts a silence recording") {
  const auto cfg = Location0();
  trigger::TriggerState s;
  std::vector<trigger::Action> all;
  for (int t = 0; t < 3; ++t) {
    auto r = trigger::Step(s, With(t, {}), cfg, t, kWall);
    s = r.state;
    all.insert(all.end(), r.actions.begin(), r.actions.end());
  }
  REQUIRE(all.size() == 1);
  CHECK(all[0].kind == ActionKind::kStartSilenceRecording);
  CHECK(all[0].at == 2.0);
  CHECK(all[0].event.event_class == trigger::EventClass::kSilence);
  CHECK(trigger::MakeFilename(all[0].event).substr(0, 7) == "000000_");
  CHECK_FALSE(all[0].event.altitude_ft);
}

TEST_CASE("scripted silence abort transcript") {
  // Aircraft parked at 8 km (inside the silence radius, outside the trigger
  // radius) until t=297, gone from 298 to 304, back at 9 km from t=305.
  // Hand trace: streak 1,2,3 at 298,299,300 -> start silence at 300 (ends
  // 310); t=305 contaminated -> abort; cooldown to 310; no further actions.
  const auto cfg = Location0();
  trigger::TriggerState s;
  std::vector<std::pair<double, ActionKind>> got;
  for (int t = 290; t <= 330; ++t) {
    airtrack::AirspaceSnapshot snap =
        t <= 297 ? With(t, {{8.0, 0xAAAAAA}}) : t < 305 ? With(t, {}) : With(t, {{9.0, 0xAAAAAA}});
    auto r = trigger::Step(s, snap, cfg, t, kWall);
    s = r.state;
    for (const auto& a : r.actions) got.emplace_back(a.at, a.kind);
    if (t == 307) CHECK(s.mode == trigger::Mode::kCooldown);
  }
  const std::vector<std::pair<double, ActionKind>> expected = {
      {300.0, ActionKind::kStartSilenceRecording},
      {305.0, ActionKind::kAbortSilenceRecording}};
  CHECK(got == expected);
  CHECK(s.mode == trigger::Mode::kIdle);
  CHECK(s.clear_streak == 0);
}

TEST_CASE("aircraft recordings run to completion then cool down") {
  auto cfg = Location0();
  trigger::TriggerState s;
  std::vector<std::pair<double, ActionKind>> got;
  for (int t = 0; t <= 80; ++t) {
    // Triggering aircraft leaves at t=10, another passes close at t=20..30.
    auto snap = t < 10 ? With(t, {{1.0, 0x111111}})
                       : (t >= 20 && t <= 30) ? With(t, {{0.5, 0x222222}}) : With(t, {});
    auto r = trigger::Step(s, snap, cfg, t, kWall);
    if (t == 0) CHECK(r.actions.at(0).event.hex == adsb::Icao(0x111111));
    s = r.state;
    for (const auto& a : r.actions) got.emplace_back(a.at, a.kind);
  }
  // Stop at 60, cooldown to 65, airspace clear since t=31 so silence at 65
  // and again after the next cooldown.
  const std::vector<std::pair<double, ActionKind>> expected = {
      {0.0, ActionKind::kStartAircraftRecording},
      {60.0, ActionKind::kStopRecording},
      {65.0, ActionKind::kStartSilenceRecording},
      {75.0, ActionKind::kStopRecording},
      {80.0, ActionKind::kStartSilenceRecording}};
  CHECK(got == expected);
}

TEST_CASE("clock regression is an error") {
  const auto cfg = Location0();
  auto r = trigger::Step({}, With(10, {}), cfg, 10, kWall);
  try {
    trigger::Step(r.state, With(9, {}), cfg, 9, kWall);
    FAIL("expected ClockRegression");
  } catch (const trigger::TriggerError& e) {
    CHECK(e.code() == trigger::TriggerErrc::kClockRegression);
  }
}

TEST_CASE("aircraft without altitude cannot label a recording") {
  const auto cfg = Location0();
  auto snap = With(0, {{1.0, 0x123456}});
  auto states = snap.aircraft();
  states[0].altitude_ft.reset();
  const auto r = trigger::Step({}, airtrack::AirspaceSnapshot(0, states), cfg, 0, kWall);
  CHECK(r.actions.empty());
}

TEST_CASE("flyby fixtures through the full tracker") {
  const auto cfg = Location0();
  SUBCASE("2.9 km closest approach -> exactly one aircraft recording") {
    const auto t = RunReplay(simulate::ScriptedApproach(cfg, 2.9), cfg);
    CHECK(Count(t, ActionKind::kStartAircraftRecording) == 1);
    for (const auto& a : t.full) {
      if (a.kind == ActionKind::kStartAircraftRecording) {
        CHECK(a.event.hex == adsb::Icao(0x7C7CD0));
        CHECK(a.event.altitude_ft == 1000);
      }
    }
  }
  SUBCASE("3.1 km closest approach -> none") {
    const auto t = RunReplay(simulate::ScriptedApproach(cfg, 3.1), cfg);
    CHECK(Count(t, ActionKind::kStartAircraftRecording) == 0);
  }
  SUBCASE("overhead pass fires at the 3 km crossing") {
    simulate::ApproachOptions opt;
    const auto t = RunReplay(simulate::ScriptedApproach(cfg, 0.0, opt), cfg);
    // At 140 kt the aircraft is still inside 3 km when the first recording
    // and its cooldown finish, so a second back-to-back recording follows.
    REQUIRE(Count(t, ActionKind::kStartAircraftRecording) == 2);
    // Path equation: along-track distance to the device is L - v t, so the
    // 3 km circle is reached at t = (L - 3) / v.
    const double v_kmps = opt.speed_kt * 1.852 / 3600.0;
    const double crossing = (opt.half_length_km - 3.0) / v_kmps;
    std::vector<double> starts;
    for (const auto& [at, kind] : t.actions) {
      if (kind == ActionKind::kStartAircraftRecording) starts.push_back(at);
    }
    CHECK(starts[1] == starts[0] + cfg.aircraft_duration_s + cfg.cooldown_s);
    for (double at : {starts[0]}) {
      CHECK(at >= crossing - 0.01);
      // Next snapshot after the crossing plus at most one position period
      // of track latency.
      CHECK(at <= crossing + cfg.snapshot_period_s + 1.0 / opt.message_rate_hz + 0.01);
    }
  }
  SUBCASE("replay is deterministic") {
    const auto sc = simulate::ScriptedApproach(cfg, 1.0);
    CHECK(RunReplay(sc, cfg).actions == RunReplay(sc, cfg).actions);
  }
}

TEST_CASE("randomized scenarios keep the recording invariants") {
  auto cfg = Location0();
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> closest(0.0, 12.0), speed(90.0, 250.0), start(0.0, 200.0);
  for (int trial = 0; trial < 6; ++trial) {
    simulate::Scenario sc;
    sc.device = kDevice;
    sc.seed = trial;
    for (int k = 0; k < 3; ++k) {
      simulate::ApproachOptions opt;
      opt.icao = adsb::Icao(0x7C0000 + trial * 16 + k);
      opt.speed_kt = speed(rng);
      opt.start_s = start(rng);
      auto one = simulate::ScriptedApproach(cfg, closest(rng), opt);
      sc.flights.push_back(one.flights[0]);
      sc.duration_s = std::max(sc.duration_s, one.duration_s);
    }

    int active = 0;
    std::optional<double> silence_started;
    trigger::MonitorLoop loop(cfg, {}, kWall, [&](const trigger::Action& a) {
      switch (a.kind) {
        case ActionKind::kStartAircraftRecording:
        case ActionKind::kStartSilenceRecording:
          ++active;
          CHECK(active == 1);
          if (a.kind == ActionKind::kStartSilenceRecording) silence_started = a.at;
          break;
        case ActionKind::kStopRecording:
        case ActionKind::kAbortSilenceRecording:
          --active;
          CHECK(active == 0);
          silence_started.reset();
          break;
      }
    });
    for (const auto& tf : simulate::Emit(sc)) loop.OnFrame(adsb::ParseFrame(tf.frame), tf.t_s);
    loop.Finish(sc.duration_s);
    CHECK(active <= 1);
  }
}

TEST_CASE("silence recordings that complete saw a clear radius throughout") {
  auto cfg = Location0();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> closest(2.0, 15.0), start(0.0, 300.0);
  for (int trial = 0; trial < 5; ++trial) {
    simulate::Scenario sc;
    sc.device = kDevice;
    for (int k = 0; k < 4; ++k) {
      simulate::ApproachOptions opt;
      opt.icao = adsb::Icao(0x7D0000 + trial * 16 + k);
      opt.start_s = start(rng);
      auto one = simulate::ScriptedApproach(cfg, closest(rng), opt);
      sc.flights.push_back(one.flights[0]);
      sc.duration_s = std::max(sc.duration_s, one.duration_s);
    }
    // Replay manually to audit each snapshot during each silence recording.
    airtrack::Tracker tracker;
    trigger::TriggerState state;
    std::vector<bool> contaminated_during;
    bool in_silence = false;
    bool dirty = false;
    const auto frames = simulate::Emit(sc);
    std::size_t next = 0;
    for (double t = 0; t <= sc.duration_s; t += cfg.snapshot_period_s) {
      while (next < frames.size() && frames[next].t_s < t) {
        tracker.Ingest(adsb::ParseFrame(frames[next].frame), frames[next].t_s);
        ++next;
      }
      const auto snap = tracker.Snapshot(t);
      bool near = false;
      for (const auto& a : snap.aircraft()) {
        if (a.airborne && a.position && airtrack::HaversineKm(kDevice, *a.position) <= cfg.silence_radius_km) near = true;
      }
      auto r = trigger::Step(state, snap, cfg, t, kWall);
      state = r.state;
      for (const auto& a : r.actions) {
        if (a.kind == ActionKind::kStartSilenceRecording) {
          in_silence = true;
          dirty = near;
        } else if (a.kind == ActionKind::kStopRecording && in_silence) {
          contaminated_during.push_back(dirty || near);
          in_silence = false;
        } else if (a.kind == ActionKind::kAbortSilenceRecording) {
          CHECK(near);
          in_silence = false;
        } else if (a.kind == ActionKind::kStartAircraftRecording) {
          const auto n = airtrack::NearestAirborne(snap, kDevice);
          REQUIRE(n);
          CHECK(n->distance_km <= cfg.trigger_distance_km);
        }
      }
      if (in_silence && near) dirty = true;
    }
    for (bool c : contaminated_during) CHECK_FALSE(c);
  }
}

TEST_CASE("config file") {
  const std::string text = R"(# two sites
[location 0]
mic_id = 1
lat = -34.95
lon = 138.53
confirmations_required = 3   # default
snapshot_period_s = 1

[location 2]
mic_id = 1
lat = -34.94
lon = 138.52
cooldown_s = 2.5
)";
  const auto cfgs = trigger::ParseTriggerConfig(text);
  REQUIRE(cfgs.size() == 2);
  CHECK(cfgs[0].trigger_distance_km == 3.0);
  CHECK(cfgs[1].trigger_distance_km == 1.5);
  CHECK(cfgs[1].cooldown_s == 2.5);
  CHECK(cfgs[0].silence_radius_km == 10.0);
  CHECK(trigger::FindLocation(cfgs, 2).device_position.lat_deg == -34.94);

  const auto again = trigger::ParseTriggerConfig(trigger::FormatTriggerConfig(cfgs));
  CHECK(again[1].cooldown_s == 2.5);
  CHECK(again[0].device_position == cfgs[0].device_position);

  auto code_of = [](const std::string& t) {
    try {
      trigger::ParseTriggerConfig(t);
    } catch (const trigger::TriggerError& e) {
      return e.code();
    }
    return trigger::TriggerErrc::kClockRegression;
  };
  CHECK(code_of("[location 0]\nlat = 1\n") == trigger::TriggerErrc::kBadConfig);
  CHECK(code_of("[location 0]\nlat=1\nlon=2\nbogus=3\n") == trigger::TriggerErrc::kBadConfig);
  CHECK(code_of("[location 0]\nlat=1\nlon=2\nsilence_radius_km=2\n") == trigger::TriggerErrc::kBadConfig);
  CHECK(code_of("[location 7]\nlat=1\nlon=2\n") == trigger::TriggerErrc::kBadConfig);
  CHECK(code_of("") == trigger::TriggerErrc::kBadConfig);
}
