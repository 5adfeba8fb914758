#pragma once

// Route simplification, speed model and the resulting space-time trajectory.

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "seatrace/geo.hpp"
#include "seatrace/model.hpp"

namespace seatrace::trajectory {

/// Metres per degree of arc at 60 nautical miles per degree.
inline constexpr double kMetersPerDegree = 60.0 * 1852.0;

/// RDP threshold in degrees for a metric tolerance `d_tol` at mean latitude
/// `mean_lat_deg`.
template <typename Scalar>
Scalar rdp_epsilon(Scalar d_tol, Scalar mean_lat_deg) {
  using std::cos;
  return Scalar(2) * d_tol / Scalar(kMetersPerDegree) * cos(geo::deg2rad(mean_lat_deg));
}

/// Euclidean distance from p to the segment a-b.
template <typename P, typename A, typename B>
typename P::Scalar point_segment_distance(const Eigen::MatrixBase<P>& p, const Eigen::MatrixBase<A>& a,
                                          const Eigen::MatrixBase<B>& b) {
  using Scalar = typename P::Scalar;
  const auto ab = (b - a).eval();
  const Scalar len2 = ab.squaredNorm();
  if (len2 == Scalar(0)) return (p - a).norm();
  const Scalar t = std::clamp((p - a).dot(ab) / len2, Scalar(0), Scalar(1));
  return (p - (a + t * ab)).norm();
}

/// Ramer-Douglas-Peucker over the rows of `points` (n x 2). Returns the
/// ascending indices of kept rows; the first and last are always kept.
template <typename Derived>
std::vector<Eigen::Index> rdp_indices(const Eigen::MatrixBase<Derived>& points,
                                      typename Derived::Scalar epsilon) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = points.rows();
  std::vector<Eigen::Index> kept;
  if (n == 0) return kept;
  if (n <= 2) {
    for (Eigen::Index i = 0; i < n; ++i) kept.push_back(i);
    return kept;
  }
  std::vector<char> keep(static_cast<std::size_t>(n), 0);
  keep.front() = keep.back() = 1;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> stack{{0, n - 1}};
  while (!stack.empty()) {
    const auto [first, last] = stack.back();
    stack.pop_back();
    if (last - first < 2) continue;
    Scalar worst = Scalar(-1);
    Eigen::Index worst_index = first;
    for (Eigen::Index i = first + 1; i < last; ++i) {
      const Scalar d = point_segment_distance(points.row(i), points.row(first), points.row(last));
      if (d > worst) {
        worst = d;
        worst_index = i;
      }
    }
    if (worst > epsilon) {
      keep[static_cast<std::size_t>(worst_index)] = 1;
      stack.emplace_back(worst_index, last);
      stack.emplace_back(first, worst_index);
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (keep[static_cast<std::size_t>(i)]) kept.push_back(i);
  }
  return kept;
}

/// (lon, lat) rows of the movement's positions.
Eigen::MatrixX2d lonlat_matrix(const Movement& movement);

Route simplify_route(const Movement& movement, double d_tol = 100.0);

struct SpeedModelParams {
  double change_fraction = 0.05;
  double min_speed = 1e-3;  // m/s floor for control points inside a moving leg
};

/// Per-record speed averaged over the interval spanning its neighbours.
std::vector<double> smoothed_speeds(const Movement& movement);

/// Cumulative along-route distance of each movement record.
std::vector<double> project_records(const Movement& movement, const Route& route,
                                    std::span<const double> waypoint_distance);

std::vector<SpeedPoint> build_speed_model(const Movement& movement, const Route& route,
                                          std::span<const double> waypoint_distance,
                                          const SpeedModelParams& params = {});

Trajectory build_trajectory(const Movement& movement, double d_tol = 100.0,
                            const SpeedModelParams& params = {});

/// Along-route distance at `t_rel` seconds after the trajectory start.
double distance_at(const Trajectory& traj, double t_rel);
/// Seconds after start at which the model reaches path distance `s`.
double time_at_distance(const Trajectory& traj, double s);
double speed_at_distance(const Trajectory& traj, double s);
double speed_at(const Trajectory& traj, double t_rel);
GeoPoint point_at_distance(const Trajectory& traj, double s);

/// Throws OutOfRange when t lies outside [start_time, end_time].
GeoPoint position_at(const Trajectory& traj, double t);

struct Quantiles {
  double median = 0.0;
  double p90 = 0.0;
  std::size_t count = 0;
};

Quantiles quantiles(std::vector<double> values);

struct SpeedComparisonBin {
  int lower_kmh = 0;  // bin [lower, lower + 1) km/h of the reported speed
  std::size_t count = 0;
  double mean_reported_kmh = 0.0;
  double mean_inferred_kmh = 0.0;
  double mean_model_kmh = 0.0;
};

struct AccuracyReport {
  Quantiles position_error_m;     // model position vs message position at message time
  Quantiles route_distance_m;     // message position vs simplified route
  Quantiles time_error_s;         // message time vs time of closest approach
  Quantiles relative_position;    // position error / route length
  Quantiles relative_time;        // time error / trajectory duration
  double fraction_route_over_tol = 0.0;  // share of route distances above d_tol
  std::vector<SpeedComparisonBin> speed_bins;
};

/// Compares every movement record with its trajectory model.
AccuracyReport validate_model(std::span<const Movement> movements,
                              std::span<const Trajectory> trajectories);

}  // namespace seatrace::trajectory
