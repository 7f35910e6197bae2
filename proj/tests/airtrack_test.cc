#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "skylisten/adsb/stream.h"
#include "skylisten/airtrack/geo.h"
#include "skylisten/airtrack/tracker.h"
#include "skylisten/simulate/encoder.h"
#include "skylisten/simulate/scenario.h"

using namespace skylisten;
using adsb::CprFormat;
using adsb::Icao;

namespace {

airtrack::AircraftState Positioned(std::uint32_t icao, LatLon p, bool airborne = true) {
  airtrack::AircraftState s;
  s.icao = Icao(icao);
  s.position = p;
  s.airborne = airborne;
  s.altitude_ft = 1000;
  return s;
}

// Point `km` east of `origin` along its parallel.
LatLon EastOf(LatLon origin, double km) {
  const double dlon = 2.0 * std::asin(std::sin(km / (2.0 * airtrack::kEarthRadiusKm)) /
                                      std::cos(origin.lat_deg * M_PI / 180.0));
  return {origin.lat_deg, origin.lon_deg + dlon * 180.0 / M_PI};
}

}  // namespace

TEST_CASE("haversine") {
  const LatLon o{0, 0};
  CHECK(airtrack::HaversineKm(o, o) == 0.0);
  // Arc length of one degree on the mean-radius sphere: R * pi / 180.
  const double one_degree = 6371.0088 * M_PI / 180.0;
  CHECK(std::fabs(airtrack::HaversineKm(o, {0, 1}) - one_degree) < 1e-9);
  CHECK(std::fabs(one_degree - 111.195) < 0.001);
  CHECK(airtrack::HaversineKm(o, {1, 0}) == doctest::Approx(airtrack::HaversineKm(o, {0, 1})));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lat(-89, 89), lon(-180, 180);
  for (int i = 0; i < 1000; ++i) {
    const LatLon a{lat(rng), lon(rng)}, b{lat(rng), lon(rng)}, c{lat(rng), lon(rng)};
    CHECK(std::fabs(airtrack::HaversineKm(a, b) - airtrack::HaversineKm(b, a)) < 1e-9);
    CHECK(airtrack::HaversineKm(a, c) <=
          airtrack::HaversineKm(a, b) + airtrack::HaversineKm(b, c) + 1e-9);
  }
}

TEST_CASE("identification creates a positionless track") {
  airtrack::Tracker t;
  const auto report = t.Ingest(adsb::ParseFrame(simulate::EncodeIdentification(Icao(0xABC123), "QFA123")), 1.0);
  CHECK(report.created);
  CHECK_FALSE(report.position_updated);
  const auto* s = t.Find(Icao(0xABC123));
  REQUIRE(s);
  CHECK(s->callsign == "QFA123");
  CHECK_FALSE(s->position);
  // Identity-only contacts never show up as the nearest aircraft.
  CHECK_FALSE(airtrack::NearestAirborne(t.Snapshot(1.0), {0, 0}));
}

TEST_CASE("even then odd position frames produce a position") {
  airtrack::Tracker t;
  const Icao icao(0x7C7CD0);
  const LatLon truth{-34.95, 138.53};
  auto r1 = t.Ingest(adsb::ParseFrame(simulate::EncodeAirbornePosition(
                         icao, truth.lat_deg, truth.lon_deg, 3250, CprFormat::kEven)),
                     10.0);
  CHECK_FALSE(r1.position_updated);
  auto r2 = t.Ingest(adsb::ParseFrame(simulate::EncodeAirbornePosition(
                         icao, truth.lat_deg, truth.lon_deg, 3250, CprFormat::kOdd)),
                     11.0);
  CHECK(r2.position_updated);
  const auto* s = t.Find(icao);
  REQUIRE(s->position);
  CHECK(airtrack::HaversineKm(*s->position, truth) < 0.010);
  CHECK(s->altitude_ft == 3250);
  CHECK(s->airborne);

  SUBCASE("a later single frame decodes locally against the track") {
    const LatLon moved{-34.94, 138.54};
    auto r3 = t.Ingest(adsb::ParseFrame(simulate::EncodeAirbornePosition(
                           icao, moved.lat_deg, moved.lon_deg, 3000, CprFormat::kEven)),
                       30.0);  // outside the pairing window of the odd frame
    CHECK(r3.position_updated);
    CHECK(airtrack::HaversineKm(*t.Find(icao)->position, moved) < 0.010);
  }
}

TEST_CASE("pairs outside the window do not decode globally") {
  airtrack::Tracker t;
  const Icao icao(0x7C7CD0);
  t.Ingest(adsb::ParseFrame(simulate::EncodeAirbornePosition(icao, -34.95, 138.53, 3250, CprFormat::kEven)), 0.0);
  const auto r = t.Ingest(adsb::ParseFrame(simulate::EncodeAirbornePosition(icao, -34.95, 138.53, 3250, CprFormat::kOdd)), 10.5);
  CHECK_FALSE(r.position_updated);
  CHECK_FALSE(t.Find(icao)->position);
}

TEST_CASE("receiver reference enables first-frame local decode") {
  airtrack::TrackerConfig cfg;
  cfg.receiver = LatLon{-34.95, 138.53};
  airtrack::Tracker t(cfg);
  const LatLon truth{-34.90, 138.60};
  const auto r = t.Ingest(adsb::ParseFrame(simulate::EncodeAirbornePosition(
                              Icao(1), truth.lat_deg, truth.lon_deg, 2000, CprFormat::kOdd)),
                          0.0);
  CHECK(r.position_updated);
  CHECK(airtrack::HaversineKm(*t.Find(Icao(1))->position, truth) < 0.010);
}

TEST_CASE("surface reports clear the airborne flag") {
  airtrack::Tracker t;
  const Icao icao(0x7C0001);
  t.Ingest(adsb::ParseFrame(simulate::EncodeAirbornePosition(icao, -34.95, 138.53, 500, CprFormat::kEven)), 0.0);
  t.Ingest(adsb::ParseFrame(simulate::EncodeAirbornePosition(icao, -34.95, 138.53, 500, CprFormat::kOdd)), 0.5);
  CHECK(t.Find(icao)->airborne);
  t.Ingest(adsb::ParseFrame(simulate::EncodeSurfacePosition(icao, -34.95, 138.53, CprFormat::kEven)), 1.0);
  CHECK_FALSE(t.Find(icao)->airborne);
  CHECK_FALSE(airtrack::NearestAirborne(t.Snapshot(1.0), {-34.95, 138.53}));
}

TEST_CASE("crc failures are dropped") {
  airtrack::Tracker t;
  auto frame = adsb::ParseFrame(simulate::EncodeIdentification(Icao(5), "ABC"));
  frame.crc_ok = false;
  CHECK(t.Ingest(frame, 0.0).dropped);
  CHECK(t.size() == 0);
}

TEST_CASE("out-of-order frames keep the newest timestamp") {
  const Icao icao(0x7C7CD0);
  simulate::Scenario sc;
  sc.device = {-34.95, 138.53};
  sc.duration_s = 30;
  sc.seed = 9;
  simulate::FlightScript f;
  f.icao = icao;
  f.message_rate_hz = 2;
  f.waypoints = {{0, {-35.0, 138.5}, 2000}, {30, {-34.9, 138.5}, 2000}};
  sc.flights = {f};
  auto frames = simulate::Emit(sc);
  std::mt19937 rng(4);
  std::shuffle(frames.begin(), frames.end(), rng);

  airtrack::Tracker t;
  double max_seen = -1;
  int out_of_order = 0;
  for (const auto& tf : frames) {
    const auto report = t.Ingest(adsb::ParseFrame(tf.frame), tf.t_s);
    if (report.out_of_order) {
      ++out_of_order;
      CHECK(tf.t_s < max_seen);
    }
    max_seen = std::max(max_seen, tf.t_s);
    CHECK(t.Find(icao)->last_seen == max_seen);
  }
  CHECK(out_of_order > 0);
}

TEST_CASE("prune") {
  airtrack::Tracker t;
  CHECK(t.Prune(100.0) == 0);
  t.Ingest(adsb::ParseFrame(simulate::EncodeIdentification(Icao(1), "A")), 0.0);
  CHECK(t.Prune(60.0) == 0);
  CHECK(t.Prune(61.0) == 1);
  CHECK(t.size() == 0);

  SUBCASE("continuous 1 Hz traffic is never pruned") {
    simulate::Scenario sc;
    sc.device = {0, 0};
    sc.duration_s = 300;
    simulate::FlightScript f;
    f.icao = Icao(0x123456);
    f.message_rate_hz = 1;
    f.waypoints = {{0, {0.01, 0.01}, 1000}};
    sc.flights = {f};
    airtrack::Tracker live;
    for (const auto& tf : simulate::Emit(sc)) {
      live.Ingest(adsb::ParseFrame(tf.frame), tf.t_s);
      CHECK(live.Prune(tf.t_s) == 0);
    }
    CHECK(live.size() == 1);
  }
}

TEST_CASE("snapshot") {
  airtrack::Tracker t;
  t.Ingest(adsb::ParseFrame(simulate::EncodeIdentification(Icao(1), "A")), 0.0);
  const auto snap = t.Snapshot(1.0);
  CHECK(snap.aircraft().size() == 1);
  t.Ingest(adsb::ParseFrame(simulate::EncodeIdentification(Icao(1), "BBB")), 2.0);
  t.Ingest(adsb::ParseFrame(simulate::EncodeIdentification(Icao(2), "C")), 2.0);
  CHECK(snap.aircraft().size() == 1);
  CHECK(snap.aircraft()[0].callsign == "A");
  CHECK(t.Snapshot(62.0).aircraft().size() == 2);
  CHECK(t.Snapshot(62.5).aircraft().empty());
}

TEST_CASE("snapshot census of a multi-aircraft replay") {
  simulate::Scenario sc;
  sc.device = {-34.95, 138.53};
  sc.duration_s = 20;
  sc.seed = 1;
  for (int i = 0; i < 12; ++i) {
    simulate::FlightScript f;
    f.icao = Icao(0x7C0000 + i);
    f.message_rate_hz = 1;
    f.include_identification = true;
    f.callsign = "T" + std::to_string(i);
    f.waypoints = {{0, {-34.9 + 0.01 * i, 138.5}, 1000 + 100 * i}, {20, {-34.8 + 0.01 * i, 138.5}, 1000 + 100 * i}};
    sc.flights.push_back(f);
  }
  airtrack::Tracker t;
  for (const auto& tf : simulate::Emit(sc)) t.Ingest(adsb::ParseFrame(tf.frame), tf.t_s);
  const auto snap = t.Snapshot(20.0);
  CHECK(snap.aircraft().size() == 12);
  for (const auto& a : snap.aircraft()) CHECK(a.position.has_value());
}

TEST_CASE("nearest airborne") {
  const LatLon device{-34.95, 138.53};
  CHECK_FALSE(airtrack::NearestAirborne(airtrack::AirspaceSnapshot(0, {}), device));

  const airtrack::AirspaceSnapshot two(0, {Positioned(0xB, EastOf(device, 5.0)),
                                           Positioned(0xA, EastOf(device, 2.0))});
  const auto n = airtrack::NearestAirborne(two, device);
  REQUIRE(n);
  CHECK(n->icao == Icao(0xA));
  CHECK(n->distance_km == doctest::Approx(2.0).epsilon(1e-9));

  const airtrack::AirspaceSnapshot tie(0, {Positioned(0xC, EastOf(device, 2.0)),
                                           Positioned(0xA, EastOf(device, 2.0)),
                                           Positioned(0x1, device, false)});
  CHECK(airtrack::NearestAirborne(tie, device)->icao == Icao(0xA));

  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> off(-0.2, 0.2);
  std::bernoulli_distribution airborne(0.8);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<airtrack::AircraftState> states;
    for (int i = 0; i < 50; ++i) {
      states.push_back(Positioned(0x100 + i, {device.lat_deg + off(rng), device.lon_deg + off(rng)},
                                  airborne(rng)));
    }
    const airtrack::AirspaceSnapshot snap(0, states);
    const auto got = airtrack::NearestAirborne(snap, device);
    double best = 1e9;
    for (const auto& s : states) {
      if (s.airborne) best = std::min(best, airtrack::HaversineKm(device, *s.position));
    }
    REQUIRE(got);
    CHECK(got->distance_km == best);
  }
}
