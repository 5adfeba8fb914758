#include "seatrace/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <tuple>

#include "seatrace/errors.hpp"
#include "seatrace/parallel.hpp"
#include "seatrace/trajectory.hpp"

namespace seatrace::metrics {

int group_index(VesselCategory category, SizeClass size) {
  return static_cast<int>(category) * kSizeClassCount + static_cast<int>(size);
}

VesselCategory group_category(int group) { return static_cast<VesselCategory>(group / kSizeClassCount); }
SizeClass group_size(int group) { return static_cast<SizeClass>(group % kSizeClassCount); }

std::optional<std::pair<std::size_t, std::size_t>> bin_range(Timestamp t0, Timestamp t1, Timestamp start,
                                                             double bin_seconds, std::size_t n_bins) {
  if (n_bins == 0 || t1 < t0) return std::nullopt;
  const double end = static_cast<double>(start) + static_cast<double>(n_bins) * bin_seconds;
  const double a = static_cast<double>(t0), b = static_cast<double>(t1);
  if (b < static_cast<double>(start) || a >= end) return std::nullopt;
  const double x0 = (a - static_cast<double>(start)) / bin_seconds;
  const double x1 = (b - static_cast<double>(start)) / bin_seconds;
  const auto last_bin = static_cast<double>(n_bins - 1);
  const double first = std::clamp(std::floor(x0), 0.0, last_bin);
  double last = t1 == t0 ? first : std::clamp(std::ceil(x1) - 1.0, 0.0, last_bin);
  if (t1 == t0 && x0 < 0.0) return std::nullopt;
  last = std::max(last, first);
  return std::make_pair(static_cast<std::size_t>(first), static_cast<std::size_t>(last));
}

namespace {

int journey_group(const Journey& j) { return group_index(j.category, size_class(j.gross_tonnage)); }

std::optional<std::size_t> event_bin(Timestamp t, const CountTimeline& tl) {
  const double x = static_cast<double>(t - tl.start) / tl.bin_seconds;
  if (x < 0.0 || x >= static_cast<double>(tl.n_bins)) return std::nullopt;
  return static_cast<std::size_t>(std::floor(x));
}

}  // namespace

CountTimeline count_timeline(std::span<const Journey> journeys, const Period& period, double bin_seconds) {
  if (!(bin_seconds > 0.0)) throw InvalidArgument("bin width must be positive");
  if (period.end <= period.start) throw InvalidArgument("empty analysis period");
  CountTimeline tl;
  tl.start = period.start;
  tl.bin_seconds = bin_seconds;
  tl.n_bins = static_cast<std::size_t>(std::ceil(period.seconds() / bin_seconds - 1e-9));
  const auto n = static_cast<Eigen::Index>(tl.n_bins);
  tl.moving = Eigen::ArrayXXi::Zero(n, kGroupCount);
  tl.stationary = Eigen::ArrayXXi::Zero(n, kGroupCount);

  std::vector<char> state(tl.n_bins);
  for (const auto& j : journeys) {
    std::fill(state.begin(), state.end(), 0);
    for (const auto& leg : j.legs) {
      const char s = std::holds_alternative<Trajectory>(leg) ? 2 : std::holds_alternative<StationaryPeriod>(leg) ? 1 : 0;
      if (s == 0) continue;
      const auto r = bin_range(leg_start(leg), leg_end(leg), tl.start, bin_seconds, tl.n_bins);
      if (!r) continue;
      for (auto b = r->first; b <= r->second; ++b) state[b] = std::max(state[b], s);
    }
    const int g = journey_group(j);
    for (std::size_t b = 0; b < tl.n_bins; ++b) {
      if (state[b] == 2) ++tl.moving(static_cast<Eigen::Index>(b), g);
      if (state[b] == 1) ++tl.stationary(static_cast<Eigen::Index>(b), g);
    }

    auto emit = [&](Timestamp t, const std::optional<std::string>& area, bool entry) {
      if (!area) return;
      if (auto b = event_bin(t, tl)) tl.events.push_back({*b, *area, entry, g});
    };
    if (!j.legs.empty()) {
      emit(j.start_time(), j.initial_entry_area, true);
      emit(j.end_time(), j.final_exit_area, false);
    }
    for (const auto& leg : j.legs) {
      if (const auto* a = std::get_if<AbsentPeriod>(&leg)) {
        emit(a->start_time, a->exit_area, false);
        emit(a->end_time, a->entry_area, true);
      }
    }
  }
  std::sort(tl.events.begin(), tl.events.end(), [](const TransitEvent& a, const TransitEvent& b) {
    return std::tie(a.bin, a.area, a.entry, a.group) < std::tie(b.bin, b.area, b.entry, b.group);
  });
  return tl;
}

namespace {

bool selected(std::span<const int> groups, int g) {
  return groups.empty() || std::find(groups.begin(), groups.end(), g) != groups.end();
}

Eigen::ArrayXd select_sum(const Eigen::ArrayXXi& counts, std::span<const int> groups) {
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(counts.rows());
  for (int g = 0; g < kGroupCount; ++g) {
    if (selected(groups, g)) out += counts.col(g).cast<double>();
  }
  return out;
}

double population_std(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size()));
}

MeanWithSpread summarize(const CountTimeline& tl, const Eigen::ArrayXd& series, std::size_t first,
                         std::size_t count) {
  MeanWithSpread out;
  if (count == 0) return out;
  out.mean = series.segment(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count)).mean();
  std::vector<double> daily;
  std::vector<double> sums;
  std::vector<std::size_t> n;
  for (std::size_t b = first; b < first + count; ++b) {
    const auto day = static_cast<std::size_t>(
        std::floor(static_cast<double>(b - first) * tl.bin_seconds / 86400.0));
    if (day >= sums.size()) {
      sums.resize(day + 1, 0.0);
      n.resize(day + 1, 0);
    }
    sums[day] += series(static_cast<Eigen::Index>(b));
    ++n[day];
  }
  for (std::size_t d = 0; d < sums.size(); ++d) {
    if (n[d] > 0) daily.push_back(sums[d] / static_cast<double>(n[d]));
  }
  out.spread = population_std(daily);
  return out;
}

}  // namespace

CountAverages average_counts(const CountTimeline& tl, std::span<const int> groups, double window_days) {
  const auto window_bins = static_cast<std::size_t>(std::llround(window_days * 86400.0 / tl.bin_seconds));
  if (!(window_days > 0.0) || window_bins > tl.n_bins) {
    throw ConfigError("stationary averaging window exceeds the analysis period");
  }
  const std::size_t first = (tl.n_bins - window_bins) / 2;
  const Eigen::ArrayXd moving = select_sum(tl.moving, groups);
  const Eigen::ArrayXd stationary = select_sum(tl.stationary, groups);
  const Eigen::ArrayXd total = moving + stationary;
  CountAverages out;
  out.moving = summarize(tl, moving, 0, tl.n_bins);
  out.stationary = summarize(tl, stationary, first, window_bins);
  out.total = summarize(tl, total, first, window_bins);
  out.stationary_window = {tl.bin_start(first), tl.bin_start(first + window_bins)};
  return out;
}

MeanWithSpread transit_rate(const CountTimeline& tl, const std::string& area, std::span<const int> groups) {
  MeanWithSpread out;
  const double days = tl.days();
  if (days <= 0.0) return out;
  const auto n_days = static_cast<std::size_t>(std::ceil(days - 1e-9));
  std::vector<double> per_day(n_days, 0.0);
  double total = 0.0;
  for (const auto& e : tl.events) {
    if (!area.empty() && e.area != area) continue;
    if (!selected(groups, e.group)) continue;
    total += 1.0;
    const auto d = static_cast<std::size_t>(static_cast<double>(e.bin) * tl.bin_seconds / 86400.0);
    per_day[std::min(d, n_days - 1)] += 1.0;
  }
  out.mean = total / days;
  out.spread = population_std(per_day);
  return out;
}

std::vector<std::string> transit_areas(const CountTimeline& tl) {
  std::set<std::string> names;
  for (const auto& e : tl.events) names.insert(e.area);
  return {names.begin(), names.end()};
}

CircularSummary circular_summary(std::span<const double> histogram) {
  CircularSummary out;
  const auto k = histogram.size();
  if (k == 0) return out;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  const double hours_per_bin = 24.0 / static_cast<double>(k);
  double c = 0.0, s = 0.0, w = 0.0;
  std::size_t best = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double theta = kTwoPi * (static_cast<double>(i) + 0.5) / static_cast<double>(k);
    c += histogram[i] * std::cos(theta);
    s += histogram[i] * std::sin(theta);
    w += histogram[i];
    if (histogram[i] > histogram[best]) best = i;
  }
  if (w <= 0.0) return out;
  out.mode_hours = (static_cast<double>(best) + 0.5) * hours_per_bin;
  double mean = std::atan2(s, c);
  if (mean < 0.0) mean += kTwoPi;
  out.mean_hours = mean / kTwoPi * 24.0;
  const double r = std::min(1.0, std::hypot(c, s) / w);
  out.std_hours = r > 0.0 ? std::sqrt(std::max(0.0, -2.0 * std::log(r))) / kTwoPi * 24.0
                          : std::numeric_limits<double>::infinity();
  return out;
}

DailyCycle daily_cycle(const CountTimeline& tl) {
  const auto k = static_cast<std::size_t>(std::llround(86400.0 / tl.bin_seconds));
  DailyCycle out;
  out.moving.assign(k, 0.0);
  out.stationary.assign(k, 0.0);
  out.entries.assign(k, 0.0);
  out.exits.assign(k, 0.0);
  std::vector<double> seen(k, 0.0);
  auto tod = [&](std::size_t b) {
    const Timestamp t = tl.bin_start(b);
    const Timestamp sec = ((t % 86400) + 86400) % 86400;
    return std::min(k - 1, static_cast<std::size_t>(static_cast<double>(sec) / tl.bin_seconds));
  };
  const Eigen::ArrayXd moving = select_sum(tl.moving, {});
  const Eigen::ArrayXd stationary = select_sum(tl.stationary, {});
  for (std::size_t b = 0; b < tl.n_bins; ++b) {
    const auto i = tod(b);
    out.moving[i] += moving(static_cast<Eigen::Index>(b));
    out.stationary[i] += stationary(static_cast<Eigen::Index>(b));
    seen[i] += 1.0;
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (seen[i] > 0.0) {
      out.moving[i] /= seen[i];
      out.stationary[i] /= seen[i];
    }
  }
  for (const auto& e : tl.events) (e.entry ? out.entries : out.exits)[tod(e.bin)] += 1.0;
  return out;
}

double circular_mean_deg(std::span<const double> bearings) {
  double s = 0.0, c = 0.0;
  for (double b : bearings) {
    s += std::sin(geo::deg2rad(b));
    c += std::cos(geo::deg2rad(b));
  }
  double m = geo::rad2deg(std::atan2(s, c));
  if (m < 0.0) m += 360.0;
  return m >= 360.0 ? m - 360.0 : m;
}

TrajectoryRaster rasterize_trajectory(const Trajectory& traj, const geo::GridSpec& grid,
                                      const geo::LandMask* mask, double step) {
  TrajectoryRaster out;
  const auto& wp = traj.route.waypoints;
  const auto& wd = traj.waypoint_distance;

  struct Run {
    geo::CellIndex cell;
    double speed_sum = 0.0;
    double sin_sum = 0.0;
    double cos_sum = 0.0;
    double t_first = 0.0;
    double t_last = 0.0;
    int n = 0;
  } run;
  const double h = grid.cell_height_m();
  auto flush = [&] {
    if (run.n == 0) return;
    const double speed = run.speed_sum / run.n;
    double bearing = geo::rad2deg(std::atan2(run.sin_sum, run.cos_sum));
    if (bearing < 0.0) bearing += 360.0;
    const double r = grid.cell_width_m(run.cell.row) / h;
    const double length = geo::mean_segment_length(bearing, r, h);
    const double duration = speed > 0.0 ? length / speed : run.t_last - run.t_first;
    out.crossings.push_back({run.cell, duration, speed, bearing});
    run = Run{};
  };

  bool continuing = false;
  for (std::size_t j = 0; j + 1 < wp.size(); ++j) {
    const double seg = wd[j + 1] - wd[j];
    if (seg <= 0.0) continue;
    bool land = false;
    if (mask) {
      try {
        land = geo::crosses_land(wp[j], wp[j + 1], *mask, step);
      } catch (const CoverageError&) {
        land = false;
      }
    }
    if (land) {
      out.excluded_time += trajectory::time_at_distance(traj, wd[j + 1]) - trajectory::time_at_distance(traj, wd[j]);
      ++out.excluded_tracklets;
      flush();
      continuing = false;
      continue;
    }
    const double bearing = geo::bearing_deg(wp[j], wp[j + 1]);
    const double sb = std::sin(geo::deg2rad(bearing)), cb = std::cos(geo::deg2rad(bearing));
    const auto samples = geo::sample_path(wp[j], wp[j + 1], step);
    for (std::size_t k = continuing ? 1 : 0; k < samples.size(); ++k) {
      const double s = k + 1 == samples.size() ? wd[j + 1] : wd[j] + static_cast<double>(k) * step;
      const auto cell = geo::try_cell_index(samples[k], grid);
      if (!cell) {
        flush();
        continue;
      }
      if (run.n > 0 && !(run.cell == *cell)) flush();
      const double t = trajectory::time_at_distance(traj, s);
      if (run.n == 0) {
        run.cell = *cell;
        run.t_first = t;
      }
      run.t_last = t;
      run.speed_sum += trajectory::speed_at(traj, t);
      run.sin_sum += sb;
      run.cos_sum += cb;
      ++run.n;
    }
    continuing = true;
  }
  flush();

  double raw = 0.0;
  for (const auto& c : out.crossings) raw += c.duration;
  const double target = std::max(0.0, traj.duration() - out.excluded_time);
  if (raw > 0.0) {
    const double scale = target / raw;
    for (auto& c : out.crossings) c.duration *= scale;
  }
  return out;
}

ActivityGrid::ActivityGrid(const geo::GridSpec& grid) : grid_(grid) {
  const Eigen::Index r = grid.rows(), c = grid.cols();
  crossing_count = Eigen::ArrayXXd::Zero(r, c);
  crossing_duration = Eigen::ArrayXXd::Zero(r, c);
  speed_sum = Eigen::ArrayXXd::Zero(r, c);
  bearing_sin = Eigen::ArrayXXd::Zero(r, c);
  bearing_cos = Eigen::ArrayXXd::Zero(r, c);
  mooring_duration = Eigen::ArrayXXd::Zero(r, c);
}

void ActivityGrid::add(const TrajectoryRaster& raster) {
  for (const auto& c : raster.crossings) {
    crossing_count(c.cell.row, c.cell.col) += 1.0;
    crossing_duration(c.cell.row, c.cell.col) += c.duration;
    speed_sum(c.cell.row, c.cell.col) += c.mean_speed;
    bearing_sin(c.cell.row, c.cell.col) += std::sin(geo::deg2rad(c.bearing));
    bearing_cos(c.cell.row, c.cell.col) += std::cos(geo::deg2rad(c.bearing));
  }
}

bool ActivityGrid::add(const StationaryPeriod& period) {
  if (!period.position_resolved) return false;
  const auto cell = geo::try_cell_index(period.idle_pos, grid_);
  if (!cell) return false;
  mooring_duration(cell->row, cell->col) += static_cast<double>(period.end_time - period.start_time);
  return true;
}

namespace {

void record_stationary(ActivityGrid& activity, const StationaryPeriod& s, RasterStats& stats) {
  if (!s.position_resolved) {
    ++stats.stationary_unresolved;
  } else if (activity.add(s)) {
    ++stats.stationary_resolved;
    stats.resolved_vessel_time += static_cast<double>(s.end_time - s.start_time);
  } else {
    ++stats.stationary_outside;
  }
}

void record_raster(ActivityGrid& activity, const TrajectoryRaster& r, RasterStats& stats) {
  activity.add(r);
  ++stats.trajectories;
  stats.crossings += r.crossings.size();
  stats.excluded_tracklets += r.excluded_tracklets;
  stats.excluded_time += r.excluded_time;
  for (const auto& c : r.crossings) stats.resolved_vessel_time += c.duration;
}

}  // namespace

void ActivityGrid::add(const Journey& journey, const geo::LandMask* mask, RasterStats& stats) {
  for (const auto& leg : journey.legs) {
    if (const auto* t = std::get_if<Trajectory>(&leg)) {
      record_raster(*this, rasterize_trajectory(*t, grid_, mask), stats);
    } else if (const auto* s = std::get_if<StationaryPeriod>(&leg)) {
      record_stationary(*this, *s, stats);
    }
  }
}

ActivityGrid rasterize_journeys(std::span<const Journey> journeys, const geo::GridSpec& grid,
                                const geo::LandMask* mask, RasterStats& stats, unsigned threads) {
  std::vector<const Trajectory*> trajectories;
  for (const auto& j : journeys) {
    for (const auto& leg : j.legs) {
      if (const auto* t = std::get_if<Trajectory>(&leg)) trajectories.push_back(t);
    }
  }
  std::vector<TrajectoryRaster> rasters(trajectories.size());
  parallel_for(trajectories.size(), threads,
               [&](std::size_t i) { rasters[i] = rasterize_trajectory(*trajectories[i], grid, mask); });
  ActivityGrid activity(grid);
  for (const auto& r : rasters) record_raster(activity, r, stats);
  for (const auto& j : journeys) {
    for (const auto& leg : j.legs) {
      if (const auto* s = std::get_if<StationaryPeriod>(&leg)) record_stationary(activity, *s, stats);
    }
  }
  return activity;
}

Eigen::ArrayXXd cell_areas(const geo::GridSpec& grid) {
  Eigen::ArrayXXd a(grid.rows(), grid.cols());
  for (int r = 0; r < grid.rows(); ++r) a.row(r).setConstant(grid.cell_area_km2(r));
  return a;
}

Eigen::ArrayXXd density_map(const ActivityGrid& activity, const Period& period) {
  return (activity.crossing_duration + activity.mooring_duration) / period.seconds() /
         cell_areas(activity.grid());
}

Eigen::ArrayXXd stationary_density(const ActivityGrid& activity, const Period& period) {
  return activity.mooring_duration / period.seconds() / cell_areas(activity.grid());
}

Eigen::ArrayXXd crossings_per_day(const ActivityGrid& activity, const Period& period) {
  return activity.crossing_count / period.days();
}

Eigen::ArrayXXd mean_speed(const ActivityGrid& activity) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return (activity.crossing_count > 0.0).select(activity.speed_sum / activity.crossing_count, nan);
}

Eigen::ArrayXXd mean_bearing(const ActivityGrid& activity) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Eigen::ArrayXXd deg = activity.bearing_sin.binaryExpr(activity.bearing_cos, [](double s, double c) {
    double b = geo::rad2deg(std::atan2(s, c));
    if (b < 0.0) b += 360.0;
    return b >= 360.0 ? b - 360.0 : b;
  });
  return (activity.crossing_count > 0.0).select(deg, nan);
}

AsciiGrid to_ascii_grid(const Eigen::ArrayXXd& layer, const geo::GridSpec& grid) {
  AsciiGrid g;
  g.values = layer.unaryExpr([&](double v) { return std::isnan(v) ? g.nodata : v; });
  g.xll = grid.lon_min;
  g.yll = grid.lat_min;
  g.dx = grid.dlon;
  g.dy = grid.dlat;
  return g;
}

}  // namespace seatrace::metrics
