#include <doctest.h>

#include <cmath>

#include "seatrace/errors.hpp"
#include "seatrace/metrics.hpp"
#include "seatrace/trajectory.hpp"
#include "support.hpp"

using namespace seatrace;
using doctest::Approx;

namespace {

Trajectory simple_trajectory(Timestamp t0, Timestamp t1, GeoPoint a = {55.0, 15.0}, double bearing = 90.0) {
  const int n = static_cast<int>((t1 - t0) / 60) + 1;
  return trajectory::build_trajectory(testing::movement_of(testing::straight_track(1, t0, a, bearing, 6.0, n)));
}

geo::GridSpec small_grid() {
  geo::GridSpec g;
  g.lat_min = 54.9;
  g.lat_max = 55.3;
  g.lon_min = 14.9;
  g.lon_max = 15.6;
  g.dlat = 1.0 / 60.0;
  g.dlon = 2.0 / 60.0;
  return g;
}

}  // namespace

TEST_CASE("group indices round trip") {
  for (int g = 0; g < metrics::kGroupCount; ++g) {
    CHECK(metrics::group_index(metrics::group_category(g), metrics::group_size(g)) == g);
  }
  CHECK(metrics::group_index(VesselCategory::Cargo, SizeClass::GE10k) == 8);
}

TEST_CASE("bin ranges of closed intervals") {
  using R = std::pair<std::size_t, std::size_t>;
  CHECK(metrics::bin_range(0, 240, 0, 240.0, 10) == R{0, 0});
  CHECK(metrics::bin_range(0, 241, 0, 240.0, 10) == R{0, 1});
  CHECK(metrics::bin_range(100, 100, 0, 240.0, 10) == R{0, 0});
  CHECK(metrics::bin_range(240, 240, 0, 240.0, 10) == R{1, 1});
  CHECK(metrics::bin_range(-500, -10, 0, 240.0, 10) == std::nullopt);
  CHECK(metrics::bin_range(2400, 3000, 0, 240.0, 10) == std::nullopt);
  CHECK(metrics::bin_range(-500, 5000, 0, 240.0, 10) == R{0, 9});
}

TEST_CASE("moving beats stationary inside a bin") {
  Journey j;
  j.mmsi = 1;
  j.category = VesselCategory::Tanker;
  j.legs.emplace_back(simple_trajectory(0, 600));
  j.legs.emplace_back(StationaryPeriod{1, 600, 1200, {55, 15}, true});
  const auto tl = metrics::count_timeline(std::vector<Journey>{j}, {0, 1440});
  const int g = metrics::group_index(VesselCategory::Tanker, SizeClass::Unknown);
  REQUIRE(tl.n_bins == 6);
  const std::vector<int> moving{1, 1, 1, 0, 0, 0}, stationary{0, 0, 0, 1, 1, 0};
  for (std::size_t b = 0; b < 6; ++b) {
    CHECK(tl.moving(static_cast<Eigen::Index>(b), g) == moving[b]);
    CHECK(tl.stationary(static_cast<Eigen::Index>(b), g) == stationary[b]);
  }
  CHECK(tl.moving.sum() == 3);
}

TEST_CASE("transit events come from absences and journey edges") {
  Journey j;
  j.mmsi = 1;
  j.legs.emplace_back(simple_trajectory(0, 600));
  j.legs.emplace_back(AbsentPeriod{1, 600, 5000, std::string("Skagerrak"), std::string("Skagerrak")});
  j.legs.emplace_back(simple_trajectory(5000, 5600));
  j.initial_entry_area = "Stockholm";
  const auto tl = metrics::count_timeline(std::vector<Journey>{j}, {0, 86400});
  REQUIRE(tl.events.size() == 3);
  CHECK(tl.events[0].area == "Stockholm");
  CHECK(tl.events[0].entry);
  CHECK(tl.events[1].bin == 2);
  CHECK_FALSE(tl.events[1].entry);
  CHECK(tl.events[2].bin == 20);
  CHECK(metrics::transit_rate(tl).mean == Approx(3.0));
  CHECK(metrics::transit_rate(tl, "Skagerrak").mean == Approx(2.0));
  CHECK(metrics::transit_areas(tl) == std::vector<std::string>{"Skagerrak", "Stockholm"});
  // bins 10..19 are absent
  CHECK(tl.moving.row(15).sum() == 0);
}

TEST_CASE("averages use a central window for stationary counts") {
  Journey j;
  j.mmsi = 1;
  j.legs.emplace_back(StationaryPeriod{1, 0, 86400, {55, 15}, true});
  j.legs.emplace_back(simple_trajectory(86400, 86400 + 3600));
  const auto tl = metrics::count_timeline(std::vector<Journey>{j}, {0, 3 * 86400});
  const auto avg = metrics::average_counts(tl, {}, 1.0);
  CHECK(avg.stationary_window.start == 86400);
  CHECK(avg.stationary_window.end == 2 * 86400);
  CHECK(avg.stationary.mean == Approx(0.0));
  CHECK(avg.moving.mean == Approx(15.0 / static_cast<double>(tl.n_bins)));
  CHECK_THROWS_AS(metrics::average_counts(tl, {}, 4.0), ConfigError);
  const int only_cargo[] = {metrics::group_index(VesselCategory::Cargo, SizeClass::Unknown)};
  CHECK(metrics::average_counts(tl, only_cargo, 3.0).total.mean == 0.0);
}

TEST_CASE("empty or inverted timelines are rejected") {
  CHECK_THROWS_AS(metrics::count_timeline({}, {10, 10}), InvalidArgument);
  CHECK_THROWS_AS(metrics::count_timeline({}, {0, 10}, 0.0), InvalidArgument);
}

TEST_CASE("circular statistics") {
  std::vector<double> h(24, 0.0);
  h[13] = 5.0;
  const auto s = metrics::circular_summary(h);
  CHECK(s.mode_hours == Approx(13.5));
  CHECK(s.mean_hours == Approx(13.5));
  CHECK(s.std_hours == Approx(0.0));
  CHECK_FALSE(std::signbit(s.std_hours));
  h[1] = 5.0;
  CHECK(metrics::circular_summary(h).std_hours > 3.0);
  const double wrap[] = {350.0, 10.0};
  const double m = metrics::circular_mean_deg(wrap);
  CHECK(std::min(m, 360.0 - m) == Approx(0.0).epsilon(1e-9));
}

TEST_CASE("rasterized durations add up to the trajectory duration") {
  const auto grid = small_grid();
  const auto traj = simple_trajectory(0, 3600, {55.05, 14.95}, 70.0);
  const auto raster = metrics::rasterize_trajectory(traj, grid);
  REQUIRE(raster.crossings.size() > 3);
  double total = 0.0;
  for (const auto& c : raster.crossings) {
    total += c.duration;
    CHECK(c.mean_speed == Approx(6.0).epsilon(1e-3));
    CHECK(c.bearing == Approx(70.0).epsilon(0.01));
  }
  CHECK(total == Approx(traj.duration()).epsilon(1e-12));
}

TEST_CASE("land tracklets are excluded from the raster") {
  const auto grid = small_grid();
  AsciiGrid e;
  e.values = Eigen::ArrayXXd::Zero(1, 2);
  e.values(0, 1) = 100.0;  // land east of lon 15.25
  e.xll = 14.9;
  e.yll = 54.9;
  e.dx = 0.35;
  e.dy = 0.4;
  const geo::LandMask mask(e, 2.0);
  // north on water, then east onto land
  auto recs = testing::straight_track(1, 0, {55.0, 15.0}, 0.0, 6.0, 40);
  auto east = testing::straight_track(1, recs.back().time + 60, geo::destination(recs.back().pos, 90, 360), 90.0, 6.0, 80);
  recs.insert(recs.end(), east.begin(), east.end());
  const auto traj = trajectory::build_trajectory(testing::movement_of(recs));
  const auto raster = metrics::rasterize_trajectory(traj, grid, &mask);
  CHECK(raster.excluded_tracklets >= 1);
  CHECK_FALSE(raster.crossings.empty());
  CHECK(raster.excluded_time > 0.0);
  double total = 0.0;
  for (const auto& c : raster.crossings) total += c.duration;
  CHECK(total == Approx(traj.duration() - raster.excluded_time).epsilon(1e-12));
}

TEST_CASE("density layers integrate to vessel time") {
  const auto grid = small_grid();
  Journey j;
  j.mmsi = 1;
  const auto traj = simple_trajectory(0, 3600, {55.05, 14.95}, 70.0);
  j.legs.emplace_back(traj);
  j.legs.emplace_back(StationaryPeriod{1, 3600, 7200, traj.route.waypoints.back(), true});
  j.legs.emplace_back(StationaryPeriod{1, 7200, 9000, {55.1, 15.2}, false});
  metrics::RasterStats stats;
  const auto act = metrics::rasterize_journeys(std::vector<Journey>{j}, grid, nullptr, stats, 2);
  const metrics::Period period{0, 86400};
  const auto density = metrics::density_map(act, period);
  const double integral = (density * metrics::cell_areas(grid)).sum();
  CHECK(integral == Approx(7200.0 / 86400.0).epsilon(1e-12));
  CHECK(stats.resolved_vessel_time == Approx(7200.0));
  CHECK(stats.stationary_resolved == 1);
  CHECK(stats.stationary_unresolved == 1);
  const auto st = metrics::stationary_density(act, period);
  CHECK((st * metrics::cell_areas(grid)).sum() == Approx(3600.0 / 86400.0));
  const auto speed = metrics::mean_speed(act);
  CHECK(std::isnan(speed(grid.rows() - 1, grid.cols() - 1)));
  const auto asc = metrics::to_ascii_grid(speed, grid);
  CHECK(asc.values(grid.rows() - 1, grid.cols() - 1) == asc.nodata);
  CHECK(asc.xll == grid.lon_min);
  CHECK(metrics::crossings_per_day(act, period).sum() == Approx(static_cast<double>(stats.crossings)));
}
