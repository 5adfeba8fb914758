#include <doctest.h>

#include <cmath>

#include "seatrace/errors.hpp"
#include "seatrace/journey.hpp"
#include "seatrace/trajectory.hpp"
#include "support.hpp"

using namespace seatrace;
using doctest::Approx;
using journey::Case;
using journey::TransitPolicy;

namespace {

/// Straight trajectory at `speed_ms` whose last record sits at `end`.
Trajectory arriving(GeoPoint end, double bearing, double speed_ms, Timestamp t_end, int n = 20) {
  const auto start = geo::destination(end, std::fmod(bearing + 180.0, 360.0), speed_ms * 60.0 * (n - 1));
  auto recs = testing::straight_track(1, t_end - 60 * (n - 1), start, bearing, speed_ms, n);
  recs.back().pos = end;
  return trajectory::build_trajectory(testing::movement_of(recs));
}

/// Straight trajectory whose first record sits at `start`.
Trajectory leaving(GeoPoint start, double bearing, double speed_ms, Timestamp t_start, int n = 20) {
  return trajectory::build_trajectory(testing::movement_of(testing::straight_track(1, t_start, start, bearing, speed_ms, n)));
}

const double k10 = 10.0 * geo::kKnot;

}  // namespace

TEST_CASE("transit threshold formula") {
  CHECK(journey::transit_time_threshold(10.0, 0.0, 6.0) == Approx(6.0).epsilon(1e-15));
  CHECK(journey::transit_time_threshold(5.0, 20.0, 6.0) == Approx(6.0 / 16.0).epsilon(1e-12));
  CHECK(journey::transit_time_threshold(44.0, 44.0, 6.0) * 3600.0 < 60.0);
  CHECK(std::isinf(journey::transit_time_threshold(0.0, 0.0, 6.0)));
  CHECK_THROWS_AS(journey::transit_time_threshold(-1.0, 2.0, 6.0), InvalidArgument);
}

TEST_CASE("case policies") {
  CHECK(TransitPolicy::for_case(Case::Df).area_variant == ingest::AreaVariant::Default);
  CHECK(TransitPolicy::for_case(Case::Low).t0_hours == 1.0);
  CHECK(TransitPolicy::for_case(Case::Low).area_variant == ingest::AreaVariant::Large);
  CHECK(TransitPolicy::for_case(Case::Hi).area_variant == ingest::AreaVariant::Small);
  CHECK(TransitPolicy::for_case(Case::Hi).t0_hours == 6.0);
  CHECK(journey::parse_case("hi") == Case::Hi);
  CHECK_THROWS(journey::parse_case("mid"));
}

TEST_CASE("gap away from any area is stationary") {
  const auto areas = ingest::baltic_transit_areas();
  const auto prev = arriving({56.0, 17.0}, 90, k10, 10000);
  const auto next = leaving({56.0, 17.0}, 90, k10, 90000);
  const auto leg = journey::classify_gap(prev, next, 0, {}, areas);
  REQUIRE(std::holds_alternative<StationaryPeriod>(leg));
  const auto& s = std::get<StationaryPeriod>(leg);
  CHECK(s.start_time == 10000);
  CHECK(s.end_time == 90000);
  CHECK(s.position_resolved);
}

TEST_CASE("far-apart endpoints leave the idle position unresolved") {
  const auto areas = ingest::baltic_transit_areas();
  const auto prev = arriving({56.0, 17.0}, 90, k10, 10000);
  const auto next = leaving({56.05, 17.0}, 90, k10, 90000);
  const auto& s = std::get<StationaryPeriod>(journey::classify_gap(prev, next, 0, {}, areas));
  CHECK_FALSE(s.position_resolved);
}

TEST_CASE("Skagerrak gaps are absences unless records arrive") {
  const auto areas = ingest::baltic_transit_areas();
  const auto prev = arriving({57.8, 9.03}, 270, k10, 10000);
  const auto next = leaving({57.9, 9.03}, 90, k10, 20000);
  const auto leg = journey::classify_gap(prev, next, 2, {}, areas);
  REQUIRE(std::holds_alternative<AbsentPeriod>(leg));
  CHECK(std::get<AbsentPeriod>(leg).exit_area == std::string(ingest::kSkagerrak));
  CHECK(std::holds_alternative<StationaryPeriod>(journey::classify_gap(prev, next, 4, {}, areas)));
}

TEST_CASE("a borderline idler flips between cases") {
  const auto prev = arriving({57.8, 9.07}, 270, k10, 10000);
  const auto next = leaving({57.8, 9.07}, 90, k10, 40000);
  const auto low = TransitPolicy::for_case(Case::Low);
  const auto hi = TransitPolicy::for_case(Case::Hi);
  CHECK(std::holds_alternative<AbsentPeriod>(
      journey::classify_gap(prev, next, 0, low, ingest::baltic_transit_areas(low.area_variant))));
  CHECK(std::holds_alternative<StationaryPeriod>(
      journey::classify_gap(prev, next, 0, hi, ingest::baltic_transit_areas(hi.area_variant))));
}

TEST_CASE("other gates use the speed-dependent threshold") {
  const auto areas = ingest::baltic_transit_areas();
  const GeoPoint stockholm{59.35, 18.05};
  const auto prev = arriving(stockholm, 0, k10, 0);
  const auto absent_next = leaving(stockholm, 180, k10, 7 * 3600);
  const auto idle_next = leaving(stockholm, 180, k10, 5 * 3600);
  CHECK(std::holds_alternative<AbsentPeriod>(journey::classify_gap(prev, absent_next, 0, {}, areas)));
  CHECK(std::holds_alternative<StationaryPeriod>(journey::classify_gap(prev, idle_next, 0, {}, areas)));
  // t0 = 1 h turns the 5 h idle into an absence
  TransitPolicy loose;
  loose.t0_hours = 1.0;
  CHECK(std::holds_alternative<AbsentPeriod>(journey::classify_gap(prev, idle_next, 0, loose, areas)));
}

TEST_CASE("Kiel zone idling beyond a day is an absence") {
  const auto areas = ingest::baltic_transit_areas();
  const auto& kiel = areas[1];
  const GeoPoint in_front{54.367, 10.150 + 200.0 / (geo::kEarthRadius * M_PI / 180.0 * std::cos(54.367 * M_PI / 180.0))};
  CHECK(journey::in_kiel_zone(in_front, kiel, 400.0));
  CHECK_FALSE(kiel.contains(in_front));
  CHECK_FALSE(journey::in_kiel_zone({54.367, 10.2}, kiel, 400.0));

  const auto prev = arriving(in_front, 90, k10, 0);
  const auto long_next = leaving(in_front, 270, k10, 25 * 3600);
  const auto short_next = leaving(in_front, 270, k10, 2 * 3600);
  const auto leg = journey::classify_gap(prev, long_next, 50, {}, areas);
  REQUIRE(std::holds_alternative<AbsentPeriod>(leg));
  CHECK(std::get<AbsentPeriod>(leg).exit_area == std::string(ingest::kKielCanal));
  CHECK(std::holds_alternative<StationaryPeriod>(journey::classify_gap(prev, short_next, 50, {}, areas)));
}

TEST_CASE("journey assembly with leading and trailing stationary periods") {
  const auto areas = ingest::baltic_transit_areas();
  cleanse::VesselData v;
  v.mmsi = 1;
  v.vessel_type = 70;
  const auto t1 = leaving({56.0, 17.0}, 90, k10, 1000);
  const auto t2 = leaving(t1.route.waypoints.back(), 0, k10, t1.end_time + 7200);
  for (Timestamp t = 0; t < 1000; t += 360) v.stationary.push_back(testing::pos(1, t, 56.0, 17.0, 0.0));
  for (Timestamp t = t1.end_time + 360; t < t2.start_time; t += 360) {
    v.stationary.push_back(testing::pos(1, t, 56.0, 17.0, 0.0));
  }
  v.stationary.push_back(testing::pos(1, t2.end_time + 3600, 57.0, 17.0, 0.0));
  const std::vector<Trajectory> trajs{t1, t2};
  const auto j = journey::build_journey(v, trajs, {}, areas, 20000.0);
  CHECK(j.category == VesselCategory::Cargo);
  REQUIRE(j.legs.size() == 5);
  CHECK(std::holds_alternative<StationaryPeriod>(j.legs[0]));
  CHECK(journey::travel_time(std::vector<Journey>{j}) == Approx(t1.duration() + t2.duration()));
  CHECK(j.start_time() == 0);
  CHECK(j.end_time() == t2.end_time + 3600);
  CHECK_FALSE(std::get<StationaryPeriod>(j.legs[4]).position_resolved);
  CHECK_FALSE(j.initial_entry_area);

  const auto clipped = journey::apply_edge_rule(j, 500, t2.end_time);
  CHECK(clipped.start_time() == 500);
  CHECK(clipped.legs.size() == 5);
  CHECK(clipped.end_time() == t2.end_time);
}

TEST_CASE("journey opening in a gate records the entry area") {
  const auto areas = ingest::baltic_transit_areas();
  cleanse::VesselData v;
  v.mmsi = 1;
  const std::vector<Trajectory> trajs{leaving({57.8, 9.03}, 90, k10, 0)};
  const auto j = journey::build_journey(v, trajs, {}, areas);
  CHECK(j.initial_entry_area == std::string(ingest::kSkagerrak));
  CHECK_FALSE(j.final_exit_area);
}

TEST_CASE("overlapping trajectories are inconsistent") {
  cleanse::VesselData v;
  v.mmsi = 1;
  const auto a = leaving({56.0, 17.0}, 90, k10, 0);
  const auto b = leaving({56.0, 17.5}, 90, k10, 100);
  const std::vector<Trajectory> trajs{a, b};
  CHECK_THROWS_AS(journey::build_journey(v, trajs, {}, ingest::baltic_transit_areas()), ConsistencyError);
}

TEST_CASE("journeys pick up tonnage") {
  std::vector<cleanse::VesselData> vs(2);
  vs[0].mmsi = 5;
  vs[1].mmsi = 6;
  const std::vector<std::vector<Trajectory>> trajs{{leaving({56.0, 17.0}, 90, k10, 0)}, {}};
  const auto js = journey::build_journeys(vs, trajs, {}, {{5, 12000.0}}, 2);
  REQUIRE(js.size() == 2);
  CHECK(js[0].gross_tonnage == 12000.0);
  CHECK_FALSE(js[1].gross_tonnage);
  CHECK(js[1].legs.empty());
}
