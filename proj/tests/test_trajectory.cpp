#include <doctest.h>

#include <random>

#include "seatrace/errors.hpp"
#include "seatrace/trajectory.hpp"
#include "support.hpp"

using namespace seatrace;
using doctest::Approx;
using testing::straight_track;

TEST_CASE("rdp epsilon scales with the cosine of latitude") {
  CHECK(trajectory::rdp_epsilon(100.0, 0.0) == Approx(200.0 / 111120.0).epsilon(1e-15));
  CHECK(trajectory::rdp_epsilon(100.0, 60.0) / trajectory::rdp_epsilon(100.0, 0.0) == Approx(0.5).epsilon(1e-15));
  CHECK(trajectory::rdp_epsilon(100.0f, 60.0f) == Approx(0.5 * 200.0 / 111120.0).epsilon(1e-6));
}

TEST_CASE("point to segment distance") {
  Eigen::RowVector2d a(0, 0), b(2, 0);
  CHECK(trajectory::point_segment_distance(Eigen::RowVector2d(1, 1), a, b) == Approx(1.0));
  CHECK(trajectory::point_segment_distance(Eigen::RowVector2d(3, 0), a, b) == Approx(1.0));
  CHECK(trajectory::point_segment_distance(Eigen::RowVector2d(1, 1), a, a) == Approx(std::sqrt(2.0)));
}

TEST_CASE("rdp keeps endpoints and drops collinear points") {
  Eigen::MatrixX2d line(5, 2);
  line << 0, 0, 1, 0, 2, 0, 3, 0, 4, 0;
  CHECK(trajectory::rdp_indices(line, 0.1) == std::vector<Eigen::Index>{0, 4});
  Eigen::MatrixX2d zig(5, 2);
  zig << 0, 0, 1, 1, 2, 0, 3, 1, 4, 0;
  CHECK(trajectory::rdp_indices(zig, 0.5).size() == 5);
  CHECK(trajectory::rdp_indices(zig, 2.0) == std::vector<Eigen::Index>{0, 4});
  CHECK(trajectory::rdp_indices(Eigen::MatrixX2d(1, 2), 1.0) == std::vector<Eigen::Index>{0});
}

TEST_CASE("rdp tolerance holds on random walks") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> step(0.0, 1.0);
  for (int walk = 0; walk < 50; ++walk) {
    Eigen::MatrixX2d pts(200, 2);
    pts.row(0).setZero();
    for (int i = 1; i < 200; ++i) pts.row(i) = pts.row(i - 1) + Eigen::RowVector2d(step(rng), step(rng));
    const double eps = 1.5;
    const auto kept = trajectory::rdp_indices(pts, eps);
    for (std::size_t k = 0; k + 1 < kept.size(); ++k) {
      for (auto i = kept[k]; i <= kept[k + 1]; ++i) {
        CHECK(trajectory::point_segment_distance(pts.row(i), pts.row(kept[k]), pts.row(kept[k + 1])) <= eps);
      }
    }
  }
}

TEST_CASE("route of a straight track has two waypoints") {
  const auto m = testing::movement_of(straight_track(1, 0, {55, 15}, 90, 6.0, 30));
  const auto route = trajectory::simplify_route(m);
  CHECK(route.waypoints.size() == 2);
  CHECK(route.source_index == std::vector<std::size_t>{0, 29});
  CHECK(route.waypoints.front() == m.records.front().pos);
}

TEST_CASE("a turn survives simplification") {
  auto recs = straight_track(1, 0, {55, 15}, 90, 6.0, 20);
  auto leg = straight_track(1, recs.back().time + 60, geo::destination(recs.back().pos, 0, 360), 0, 6.0, 20);
  recs.insert(recs.end(), leg.begin(), leg.end());
  const auto route = trajectory::simplify_route(testing::movement_of(recs));
  REQUIRE(route.waypoints.size() >= 3);
  CHECK(route.source_index[1] == 19);
}

TEST_CASE("constant speed trajectory reproduces its records") {
  const auto recs = straight_track(1, 1000, {55, 15}, 45, 7.0, 40);
  const auto traj = trajectory::build_trajectory(testing::movement_of(recs));
  CHECK(traj.start_time == 1000);
  CHECK(traj.end_time == recs.back().time);
  CHECK(trajectory::distance_at(traj, traj.duration()) == Approx(traj.length()).epsilon(1e-9));
  CHECK(trajectory::speed_at(traj, 100.0) == Approx(7.0).epsilon(1e-3));
  for (const auto& r : recs) {
    const auto p = trajectory::position_at(traj, static_cast<double>(r.time));
    CHECK(geo::distance_m(p, r.pos) < 1.0);
  }
  CHECK_THROWS_AS(trajectory::position_at(traj, 999.0), OutOfRange);
  CHECK_THROWS_AS(trajectory::position_at(traj, static_cast<double>(traj.end_time) + 1.0), OutOfRange);
}

TEST_CASE("time and distance are inverse on an accelerating track") {
  std::vector<AisRecord> recs;
  GeoPoint p{56, 17};
  double v = 2.0;
  for (int i = 0; i < 60; ++i) {
    recs.push_back(testing::pos(1, i * 60, p.lat, p.lon, v / geo::kKnot));
    p = geo::destination(p, 10.0, v * 60.0);
    v += 0.05;
  }
  const auto traj = trajectory::build_trajectory(testing::movement_of(recs));
  CHECK(traj.speed_points.size() > 2);
  for (double t = 0; t <= traj.duration(); t += 97.0) {
    CHECK(trajectory::time_at_distance(traj, trajectory::distance_at(traj, t)) == Approx(t).epsilon(1e-6));
  }
  CHECK(trajectory::speed_at(traj, 0.0) < trajectory::speed_at(traj, traj.duration()));
  for (std::size_t k = 1; k < traj.speed_points.size(); ++k) {
    CHECK(traj.speed_points[k].time > traj.speed_points[k - 1].time);
    CHECK(traj.speed_points[k].path_distance > traj.speed_points[k - 1].path_distance);
  }
}

TEST_CASE("projected record distances are monotone and span the route") {
  auto recs = straight_track(1, 0, {55, 15}, 90, 6.0, 20);
  recs[7].pos = geo::destination(recs[7].pos, 0, 50);
  const auto m = testing::movement_of(recs);
  const auto route = trajectory::simplify_route(m);
  std::vector<double> wd{0.0};
  for (std::size_t k = 1; k < route.waypoints.size(); ++k) {
    wd.push_back(wd.back() + geo::distance_m(route.waypoints[k - 1], route.waypoints[k]));
  }
  const auto s = trajectory::project_records(m, route, wd);
  CHECK(s.front() == 0.0);
  CHECK(s.back() == Approx(wd.back()));
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] >= s[i - 1]);
}

TEST_CASE("quantiles interpolate linearly") {
  const auto q = trajectory::quantiles({4.0, 1.0, 3.0, 2.0});
  CHECK(q.median == Approx(2.5));
  CHECK(q.p90 == Approx(3.7));
  CHECK(q.count == 4);
  CHECK(trajectory::quantiles({}).count == 0);
}

TEST_CASE("validation of a clean track reports small errors") {
  const auto recs = straight_track(1, 0, {55, 15}, 120, 6.0, 50);
  const auto m = testing::movement_of(recs);
  const std::vector<Movement> ms{m};
  const std::vector<Trajectory> ts{trajectory::build_trajectory(m)};
  const auto rep = trajectory::validate_model(ms, ts);
  CHECK(rep.position_error_m.count == 50);
  CHECK(rep.position_error_m.p90 < 1.0);
  CHECK(rep.route_distance_m.p90 < 1.0);
  CHECK(rep.time_error_s.p90 < 1.0);
  CHECK(rep.fraction_route_over_tol == 0.0);
  REQUIRE_FALSE(rep.speed_bins.empty());
  CHECK(rep.speed_bins.front().lower_kmh == 21);
}
