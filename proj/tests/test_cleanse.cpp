#include <doctest.h>

#include <random>

#include "seatrace/cleanse.hpp"
#include "seatrace/geo.hpp"
#include "support.hpp"

using namespace seatrace;
using testing::pos;
using testing::straight_track;

namespace {

const std::vector<ingest::TransitArea> kAreas = ingest::baltic_transit_areas();

}  // namespace

TEST_CASE("pair speed handles coincident times") {
  CHECK(cleanse::pair_speed(pos(1, 0, 55, 15), pos(1, 0, 55, 15)) == 0.0);
  CHECK(std::isinf(cleanse::pair_speed(pos(1, 0, 55, 15), pos(1, 0, 55.001, 15))));
  const double d = geo::distance_m({55, 15}, {55.01, 15});
  CHECK(cleanse::pair_speed(pos(1, 0, 55, 15), pos(1, 100, 55.01, 15)) == doctest::Approx(d / 100.0));
}

TEST_CASE("grouping sorts by time and drops exact repeats") {
  const std::vector<AisRecord> in{pos(2, 5, 55, 15), pos(1, 9, 55, 15), pos(1, 3, 55, 15), pos(1, 9, 55, 15),
                                  testing::stat(1, 9, 55, 15, 70)};
  std::vector<std::vector<AisRecord>> vessels;
  CHECK(cleanse::group_by_vessel(in, vessels) == 1);
  REQUIRE(vessels.size() == 2);
  CHECK(vessels[0].front().mmsi == 1u);
  CHECK(vessels[0].size() == 3);
  CHECK(vessels[0][0].time == 3);
}

TEST_CASE("vessels confined to a small square are removed") {
  std::vector<std::vector<AisRecord>> vessels{
      {pos(1, 0, 55, 15), pos(1, 600, 55.001, 15.001)},
      straight_track(2, 0, {55, 15}, 90, 6.0, 10),
  };
  const auto [n, recs] = cleanse::remove_static_vessels(vessels, 400.0);
  CHECK(n == 1);
  CHECK(recs == 2);
  CHECK(vessels.size() == 1);
}

TEST_CASE("static report positions are interpolated between position reports") {
  std::vector<AisRecord> recs{pos(1, 0, 55.0, 15.0), testing::stat(1, 25, 10.0, 10.0, 70), pos(1, 100, 55.01, 15.0)};
  CHECK(cleanse::correct_static_positions(recs) == 1);
  CHECK(recs[1].pos.lat == doctest::Approx(55.0025).epsilon(1e-6));
  CHECK(recs[1].pos.lon == doctest::Approx(15.0).epsilon(1e-6));
}

TEST_CASE("low-speed duplicates within a few seconds are dropped") {
  const std::vector<AisRecord> recs{pos(1, 0, 55, 15), pos(1, 2, 55.000001, 15), pos(1, 10, 55.000002, 15)};
  CHECK(cleanse::remove_duplicates(recs).size() == 2);
}

TEST_CASE("speed split yields stationary records between movements") {
  auto recs = straight_track(1, 0, {55, 15}, 90, 6.0, 10);
  const auto stop = recs.back().pos;
  for (int k = 1; k <= 5; ++k) recs.push_back(pos(1, recs.back().time + 360, stop.lat, stop.lon, 0.0));
  auto leg2 = straight_track(1, recs.back().time + 60, geo::destination(stop, 0, 360), 0, 6.0, 10);
  recs.insert(recs.end(), leg2.begin(), leg2.end());

  const auto seg = cleanse::segment_movements(recs, kAreas);
  REQUIRE(seg.movements.size() == 2);
  CHECK(seg.movements[0].records.size() == 10);
  CHECK(seg.stationary.size() == 4);
  CHECK(seg.movements[1].records.front().time == recs[14].time);
  CHECK(seg.removed.empty());
}

TEST_CASE("isolated record after a long gap is removed") {
  auto recs = straight_track(1, 0, {55, 15}, 90, 6.0, 10);
  recs.push_back(pos(1, recs.back().time + 50 * 3600, 55.5, 16.0));
  const auto seg = cleanse::segment_movements(recs, kAreas);
  CHECK(seg.movements.size() == 1);
  CHECK(seg.removed.size() == 1);
}

TEST_CASE("a pass through a transit area splits at the largest gap inside it") {
  // Northbound along lon 9.02 through the Limfjord box; the track then
  // ends inside the Skagerrak box.
  std::vector<AisRecord> recs;
  Timestamp t = 0;
  for (double lat = 56.40; lat <= 57.20 + 1e-9; lat += 0.02) {
    recs.push_back(pos(1, t, lat, 9.02, 12.0));
    t += (lat > 56.79 && lat < 56.81) ? 600 : 120;
  }
  const auto seg = cleanse::segment_movements(recs, kAreas);
  REQUIRE(seg.movements.size() == 2);
  const auto& first = seg.movements[0].records;
  CHECK(seg.movements[1].records.front().time - first.back().time == 600);
}

TEST_CASE("a track ending inside a transit area is not cut again") {
  auto recs = straight_track(1, 0, {57.8, 9.2}, 270, 6.0, 30);  // ends inside the Skagerrak box
  REQUIRE(ingest::in_transit_area(recs.back().pos, kAreas));
  const auto seg = cleanse::segment_movements(recs, kAreas);
  REQUIRE(seg.movements.size() == 1);
  CHECK(seg.movements[0].records.size() == recs.size());
}

TEST_CASE("movement inside a transit area between idle periods is removed") {
  std::vector<AisRecord> recs{pos(1, 0, 57.5, 9.01, 0.0), pos(1, 600, 57.5, 9.01, 0.0)};
  for (int k = 1; k <= 4; ++k) recs.push_back(pos(1, 600 + 60 * k, 57.5 + 0.002 * k, 9.01, 8.0));
  recs.push_back(pos(1, 1900, 57.508, 9.01, 0.0));
  recs.push_back(pos(1, 2500, 57.508, 9.01, 0.0));
  const auto seg = cleanse::segment_movements(recs, kAreas);
  CHECK(seg.movements.empty());
  CHECK(seg.removed.size() == 5);
}

TEST_CASE("speed outliers are removed until a fixpoint") {
  auto recs = straight_track(1, 0, {55, 15}, 90, 6.0, 20);
  recs[8].pos = geo::destination(recs[8].pos, 0, 5000);  // 5 km jump in 60 s
  const auto res = cleanse::remove_outliers({testing::movement_of(recs)});
  REQUIRE(res.movements.size() == 1);
  CHECK(res.rejected.size() >= 1);
  CHECK(res.rejected.front().time == recs[8].time);
  const auto& kept = res.movements[0].records;
  for (std::size_t i = 1; i < kept.size(); ++i) CHECK(cleanse::pair_speed(kept[i - 1], kept[i]) <= 50 * geo::kKnot);
  for (std::size_t i = 1; i + 1 < kept.size(); ++i) CHECK(std::abs(cleanse::central_acceleration(kept, i)) <= 1.0);
}

TEST_CASE("acceleration outliers go without touching the speed rule") {
  auto recs = straight_track(1, 0, {55, 15}, 90, 5.0, 30, 10);
  recs[10].pos = geo::destination(recs[10].pos, 90, 120);
  const auto res = cleanse::remove_outliers({testing::movement_of(recs)});
  CHECK(res.by_speed == 0);
  CHECK(res.by_accel >= 1);
  REQUIRE(res.movements.size() == 1);
  const auto& kept = res.movements[0].records;
  for (std::size_t i = 1; i + 1 < kept.size(); ++i) CHECK(std::abs(cleanse::central_acceleration(kept, i)) <= 1.0);
}

TEST_CASE("short tracks become stationary in the area filter") {
  const auto tiny = straight_track(1, 0, {55, 15}, 90, 1.0, 4);
  const auto long_track = straight_track(1, 1000, {55, 15}, 90, 6.0, 10);
  const auto res = cleanse::area_filter_movements({testing::movement_of(tiny), testing::movement_of(long_track)});
  CHECK(res.reclassified_movements == 1);
  CHECK(res.stationary.size() == 4);
  CHECK(res.movements.size() == 1);
}

TEST_CASE("combining drops the first record of the later movement") {
  auto a = straight_track(1, 0, {55, 15}, 90, 6.0, 10);
  auto b = straight_track(1, a.back().time + 120, geo::destination(a.back().pos, 90, 360), 90, 6.0, 10);
  const auto res = cleanse::combine_movements({testing::movement_of(b), testing::movement_of(a)});
  CHECK(res.merges == 1);
  REQUIRE(res.movements.size() == 1);
  CHECK(res.movements[0].records.size() == 19);
  CHECK(res.dropped.front().time == b.front().time);

  const auto blocked = cleanse::combine_movements({testing::movement_of(a), testing::movement_of(b)}, {},
                                                  [](const Movement&, const Movement&) { return true; });
  CHECK(blocked.movements.size() == 2);
  auto c = straight_track(1, a.back().time + 121, a.back().pos, 90, 6.0, 10);
  CHECK(cleanse::combine_movements({testing::movement_of(a), testing::movement_of(c)}).merges == 0);
}

TEST_CASE("full chain conserves records on noisy input") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 0.002);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<AisRecord> recs;
  for (Mmsi v = 1; v <= 12; ++v) {
    GeoPoint p{55.0 + 0.2 * v, 15.0};
    Timestamp t = 0;
    for (int i = 0; i < 400; ++i) {
      t += u(rng) < 0.05 ? 3600 : 60;
      const bool idle = (i / 50) % 3 == 2;
      if (!idle) p = geo::destination(p, 80.0, 350.0);
      auto q = p;
      if (u(rng) < 0.03) q = {p.lat + noise(rng) * 20.0, p.lon + noise(rng) * 20.0};
      recs.push_back(pos(v, t, q.lat, q.lon, idle ? 0.0 : 11.0));
      if (u(rng) < 0.02) recs.push_back(recs.back());
      if (i % 6 == 0) recs.push_back(testing::stat(v, t + 30, q.lat, q.lon, 70, "X"));
    }
  }
  recs.push_back(pos(99, 0, 56, 16));
  recs.push_back(pos(99, 600, 56, 16));
  const auto out = cleanse::run_cleanse(recs, kAreas);
  const auto& r = out.report;
  CHECK(r.kept_in_movements + r.stationary_records + r.removed_total() == recs.size());
  CHECK(r.static_vessels == 1);
  CHECK(r.exact_duplicates > 0);
  for (const auto& v : out.vessels) {
    for (const auto& m : v.movements) {
      CHECK(m.records.size() >= 2);
    }
  }
}
