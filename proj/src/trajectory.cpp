#include "seatrace/trajectory.hpp"

#include <limits>
#include <map>

#include "seatrace/errors.hpp"

namespace seatrace::trajectory {

Eigen::MatrixX2d lonlat_matrix(const Movement& movement) {
  Eigen::MatrixX2d m(static_cast<Eigen::Index>(movement.records.size()), 2);
  for (std::size_t i = 0; i < movement.records.size(); ++i) {
    m(static_cast<Eigen::Index>(i), 0) = movement.records[i].pos.lon;
    m(static_cast<Eigen::Index>(i), 1) = movement.records[i].pos.lat;
  }
  return m;
}

Route simplify_route(const Movement& movement, double d_tol) {
  if (movement.records.size() < 2) throw InvalidArgument("route needs at least two records");
  if (!(d_tol > 0.0)) throw InvalidArgument("d_tol must be positive");
  const Eigen::MatrixX2d pts = lonlat_matrix(movement);
  const double eps = rdp_epsilon(d_tol, pts.col(1).mean());
  Route route;
  route.d_tol = d_tol;
  for (const auto i : rdp_indices(pts, eps)) {
    route.waypoints.push_back(movement.records[static_cast<std::size_t>(i)].pos);
    route.source_index.push_back(static_cast<std::size_t>(i));
  }
  return route;
}

std::vector<double> smoothed_speeds(const Movement& movement) {
  const auto& r = movement.records;
  const std::size_t n = r.size();
  std::vector<double> v(n, 0.0);
  if (n < 2) return v;
  std::vector<double> d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) d[i] = geo::distance_m(r[i].pos, r[i + 1].pos);
  auto rate = [](double dist, Timestamp dt) { return dt > 0 ? dist / static_cast<double>(dt) : 0.0; };
  v[0] = rate(d[0], r[1].time - r[0].time);
  v[n - 1] = rate(d[n - 2], r[n - 1].time - r[n - 2].time);
  for (std::size_t i = 1; i + 1 < n; ++i) v[i] = rate(d[i - 1] + d[i], r[i + 1].time - r[i - 1].time);
  return v;
}

std::vector<double> project_records(const Movement& movement, const Route& route,
                                    std::span<const double> waypoint_distance) {
  const auto& r = movement.records;
  std::vector<double> s(r.size(), 0.0);
  const std::size_t w = route.waypoints.size();
  if (w < 2) return s;
  std::size_t seg = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    while (seg + 2 < w && route.source_index[seg + 1] <= i) ++seg;
    const auto& a = route.waypoints[seg];
    const auto& b = route.waypoints[seg + 1];
    const double f = geo::project_onto_segment(r[i].pos, a, b);
    s[i] = waypoint_distance[seg] + f * (waypoint_distance[seg + 1] - waypoint_distance[seg]);
    if (i > 0) s[i] = std::max(s[i], s[i - 1]);
  }
  s.front() = 0.0;
  s.back() = waypoint_distance.back();
  return s;
}

namespace {

std::vector<double> cumulative_length(const std::vector<GeoPoint>& pts) {
  std::vector<double> out(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) out[i] = out[i - 1] + geo::distance_m(pts[i - 1], pts[i]);
  return out;
}

std::vector<SpeedPoint> uniform_model(double length, double duration) {
  const double v = duration > 0.0 ? length / duration : 0.0;
  return {{0.0, 0.0, v}, {length, duration, v}};
}

}  // namespace

std::vector<SpeedPoint> build_speed_model(const Movement& movement, const Route& route,
                                          std::span<const double> waypoint_distance,
                                          const SpeedModelParams& params) {
  const auto& r = movement.records;
  if (r.size() < 2) throw InvalidArgument("speed model needs at least two records");
  const double length = waypoint_distance.empty() ? 0.0 : waypoint_distance.back();
  const double duration = static_cast<double>(r.back().time - r.front().time);
  if (!(length > 0.0) || !(duration > 0.0)) return uniform_model(length, duration);

  const auto v = smoothed_speeds(movement);
  const auto s = project_records(movement, route, waypoint_distance);

  std::vector<std::size_t> emitted{0};
  double last = v[0];
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    const bool changed = last > 0.0 ? std::abs(v[i] - last) >= params.change_fraction * last : v[i] > 0.0;
    if (changed) {
      emitted.push_back(i);
      last = v[i];
    }
  }
  emitted.push_back(r.size() - 1);

  std::vector<SpeedPoint> pts;
  for (const auto i : emitted) {
    const SpeedPoint p{s[i], 0.0, std::max(v[i], params.min_speed)};
    if (!pts.empty() && p.path_distance <= pts.back().path_distance) {
      // Keep the endpoint; drop the interior point it collides with.
      if (i + 1 == r.size() && pts.size() > 1) {
        pts.back() = p;
      }
      continue;
    }
    pts.push_back(p);
  }
  if (pts.size() < 2 || pts.back().path_distance != length) return uniform_model(length, duration);

  double modeled = 0.0;
  std::vector<double> dt(pts.size() - 1);
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    dt[k] = 2.0 * (pts[k + 1].path_distance - pts[k].path_distance) / (pts[k].speed + pts[k + 1].speed);
    modeled += dt[k];
  }
  const double scale = modeled / duration;
  double t = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    pts[k].speed *= scale;
    pts[k].time = t;
    if (k + 1 < pts.size()) t += dt[k] / scale;
  }
  pts.back().time = duration;
  return pts;
}

Trajectory build_trajectory(const Movement& movement, double d_tol, const SpeedModelParams& params) {
  Trajectory traj;
  traj.mmsi = movement.mmsi;
  traj.start_time = movement.start_time();
  traj.end_time = movement.end_time();
  traj.route = simplify_route(movement, d_tol);
  traj.waypoint_distance = cumulative_length(traj.route.waypoints);
  traj.speed_points = build_speed_model(movement, traj.route, traj.waypoint_distance, params);
  return traj;
}

namespace {

// Index k of the control interval [k, k+1] containing x along `key`.
template <class Key>
std::size_t control_interval(const std::vector<SpeedPoint>& pts, double x, Key key) {
  auto it = std::upper_bound(pts.begin(), pts.end(), x,
                             [&](double value, const SpeedPoint& p) { return value < key(p); });
  std::size_t k = it == pts.begin() ? 0 : static_cast<std::size_t>(it - pts.begin()) - 1;
  return std::min(k, pts.size() - 2);
}

}  // namespace

double distance_at(const Trajectory& traj, double t_rel) {
  const auto& pts = traj.speed_points;
  if (pts.size() < 2) return 0.0;
  t_rel = std::clamp(t_rel, 0.0, pts.back().time);
  const auto k = control_interval(pts, t_rel, [](const SpeedPoint& p) { return p.time; });
  const auto& a = pts[k];
  const auto& b = pts[k + 1];
  const double span = b.time - a.time;
  if (span <= 0.0) return a.path_distance;
  const double dt = t_rel - a.time;
  const double accel = (b.speed - a.speed) / span;
  return std::min(b.path_distance, a.path_distance + a.speed * dt + 0.5 * accel * dt * dt);
}

double time_at_distance(const Trajectory& traj, double s) {
  const auto& pts = traj.speed_points;
  if (pts.size() < 2) return 0.0;
  s = std::clamp(s, 0.0, pts.back().path_distance);
  const auto k = control_interval(pts, s, [](const SpeedPoint& p) { return p.path_distance; });
  const auto& a = pts[k];
  const auto& b = pts[k + 1];
  const double span = b.time - a.time;
  const double ds = s - a.path_distance;
  if (span <= 0.0 || ds <= 0.0) return a.time;
  const double accel = (b.speed - a.speed) / span;
  const double disc = std::max(0.0, a.speed * a.speed + 2.0 * accel * ds);
  const double denom = a.speed + std::sqrt(disc);
  if (denom <= 0.0) return a.time;
  return std::min(b.time, a.time + 2.0 * ds / denom);
}

double speed_at(const Trajectory& traj, double t_rel) {
  const auto& pts = traj.speed_points;
  if (pts.empty()) return 0.0;
  if (pts.size() < 2) return pts.front().speed;
  t_rel = std::clamp(t_rel, 0.0, pts.back().time);
  const auto k = control_interval(pts, t_rel, [](const SpeedPoint& p) { return p.time; });
  const auto& a = pts[k];
  const auto& b = pts[k + 1];
  const double span = b.time - a.time;
  if (span <= 0.0) return a.speed;
  return a.speed + (b.speed - a.speed) * (t_rel - a.time) / span;
}

double speed_at_distance(const Trajectory& traj, double s) {
  return speed_at(traj, time_at_distance(traj, s));
}

GeoPoint point_at_distance(const Trajectory& traj, double s) {
  const auto& wp = traj.route.waypoints;
  const auto& wd = traj.waypoint_distance;
  if (wp.empty()) throw InvalidArgument("trajectory has no waypoints");
  if (wp.size() == 1 || s <= 0.0) return wp.front();
  if (s >= wd.back()) return wp.back();
  auto it = std::upper_bound(wd.begin(), wd.end(), s);
  const auto j = static_cast<std::size_t>(it - wd.begin()) - 1;
  const double seg = wd[j + 1] - wd[j];
  return seg > 0.0 ? geo::interpolate(wp[j], wp[j + 1], (s - wd[j]) / seg) : wp[j];
}

GeoPoint position_at(const Trajectory& traj, double t) {
  if (t < static_cast<double>(traj.start_time) || t > static_cast<double>(traj.end_time)) {
    throw OutOfRange("time outside trajectory span");
  }
  return point_at_distance(traj, distance_at(traj, t - static_cast<double>(traj.start_time)));
}

Quantiles quantiles(std::vector<double> values) {
  Quantiles q;
  q.count = values.size();
  if (values.empty()) return q;
  std::sort(values.begin(), values.end());
  auto at = [&](double p) {
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  q.median = at(0.5);
  q.p90 = at(0.9);
  return q;
}

namespace {

double route_distance(const GeoPoint& p, const Route& route) {
  if (route.waypoints.size() == 1) return geo::distance_m(p, route.waypoints.front());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j + 1 < route.waypoints.size(); ++j) {
    best = std::min(best, geo::distance_to_segment_m(p, route.waypoints[j], route.waypoints[j + 1]));
  }
  return best;
}

// Path distance of the closest route point to p restricted to [s_lo, s_hi].
double closest_path_distance(const GeoPoint& p, const Trajectory& traj, double s_lo, double s_hi) {
  const auto& wp = traj.route.waypoints;
  const auto& wd = traj.waypoint_distance;
  double best_s = s_lo;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j + 1 < wp.size(); ++j) {
    if (wd[j + 1] < s_lo || wd[j] > s_hi) continue;
    const double seg = wd[j + 1] - wd[j];
    double s = wd[j];
    if (seg > 0.0) {
      const double f_lo = std::max(0.0, (s_lo - wd[j]) / seg);
      const double f_hi = std::min(1.0, (s_hi - wd[j]) / seg);
      const double f = std::clamp(geo::project_onto_segment(p, wp[j], wp[j + 1]), f_lo, f_hi);
      s = wd[j] + f * seg;
    }
    const double d = geo::distance_m(p, point_at_distance(traj, s));
    if (d < best_d) {
      best_d = d;
      best_s = s;
    }
  }
  return best_s;
}

double median_interval(const Movement& m) {
  std::vector<double> dt;
  for (std::size_t i = 1; i < m.records.size(); ++i) {
    dt.push_back(static_cast<double>(m.records[i].time - m.records[i - 1].time));
  }
  return quantiles(std::move(dt)).median;
}

struct SpeedAccumulator {
  std::size_t n = 0;
  double reported = 0.0, inferred = 0.0, model = 0.0;
};

}  // namespace

AccuracyReport validate_model(std::span<const Movement> movements,
                              std::span<const Trajectory> trajectories) {
  if (movements.size() != trajectories.size()) {
    throw InvalidArgument("validate_model needs paired movements and trajectories");
  }
  constexpr double kKmh = 3.6;
  std::vector<double> pos_err, route_err, time_err, rel_pos, rel_time;
  std::size_t over_tol = 0;
  std::map<int, SpeedAccumulator> bins;
  for (std::size_t m = 0; m < movements.size(); ++m) {
    const auto& mv = movements[m];
    const auto& traj = trajectories[m];
    const double length = traj.length();
    const double duration = traj.duration();
    const double base_window = std::max(1.0, 2.0 * median_interval(mv));
    const auto inferred = smoothed_speeds(mv);
    for (std::size_t i = 0; i < mv.records.size(); ++i) {
      const auto& rec = mv.records[i];
      const double t_rel = static_cast<double>(rec.time - traj.start_time);
      const double e_pos = geo::distance_m(rec.pos, position_at(traj, static_cast<double>(rec.time)));
      const double e_route = route_distance(rec.pos, traj.route);
      pos_err.push_back(e_pos);
      route_err.push_back(e_route);
      if (e_route > traj.route.d_tol) ++over_tol;
      if (length > 0.0) rel_pos.push_back(e_pos / length);

      double window = base_window;
      double s_star = 0.0;
      for (;;) {
        const double t_lo = std::max(0.0, t_rel - window);
        const double t_hi = std::min(duration, t_rel + window);
        const double s_lo = distance_at(traj, t_lo);
        const double s_hi = distance_at(traj, t_hi);
        s_star = closest_path_distance(rec.pos, traj, s_lo, s_hi);
        const bool full = t_lo <= 0.0 && t_hi >= duration;
        const bool at_edge = (s_star <= s_lo && t_lo > 0.0) || (s_star >= s_hi && t_hi < duration);
        if (full || !at_edge) break;
        window *= 2.0;
      }
      const double e_time = std::abs(t_rel - time_at_distance(traj, s_star));
      time_err.push_back(e_time);
      if (duration > 0.0) rel_time.push_back(e_time / duration);

      if (rec.kind == RecordKind::PositionReport && rec.sog) {
        const double reported = *rec.sog * geo::kKnot * kKmh;
        auto& acc = bins[static_cast<int>(std::floor(reported))];
        ++acc.n;
        acc.reported += reported;
        acc.inferred += inferred[i] * kKmh;
        acc.model += speed_at(traj, t_rel) * kKmh;
      }
    }
  }
  AccuracyReport report;
  report.fraction_route_over_tol =
      route_err.empty() ? 0.0 : static_cast<double>(over_tol) / static_cast<double>(route_err.size());
  report.position_error_m = quantiles(std::move(pos_err));
  report.route_distance_m = quantiles(std::move(route_err));
  report.time_error_s = quantiles(std::move(time_err));
  report.relative_position = quantiles(std::move(rel_pos));
  report.relative_time = quantiles(std::move(rel_time));
  for (const auto& [lower, acc] : bins) {
    const auto n = static_cast<double>(acc.n);
    report.speed_bins.push_back({lower, acc.n, acc.reported / n, acc.inferred / n, acc.model / n});
  }
  return report;
}

}  // namespace seatrace::trajectory
