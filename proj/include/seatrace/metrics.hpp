#pragma once

// Vessel counts per time bin, transit rates and gridded activity maps.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "seatrace/ascii_grid.hpp"
#include "seatrace/geo.hpp"
#include "seatrace/model.hpp"

namespace seatrace::metrics {

struct Period {
  Timestamp start = 0;
  Timestamp end = 0;

  double seconds() const { return static_cast<double>(end - start); }
  double days() const { return seconds() / 86400.0; }
};

inline constexpr int kGroupCount = kCategoryCount * kSizeClassCount;

int group_index(VesselCategory category, SizeClass size);
VesselCategory group_category(int group);
SizeClass group_size(int group);

struct TransitEvent {
  std::size_t bin = 0;
  std::string area;
  bool entry = false;
  int group = 0;
};

struct CountTimeline {
  Timestamp start = 0;
  double bin_seconds = 240.0;
  std::size_t n_bins = 0;
  Eigen::ArrayXXi moving;      // n_bins x kGroupCount
  Eigen::ArrayXXi stationary;  // n_bins x kGroupCount
  std::vector<TransitEvent> events;  // sorted by (bin, area, entry, group)

  Timestamp bin_start(std::size_t b) const {
    return start + static_cast<Timestamp>(std::llround(static_cast<double>(b) * bin_seconds));
  }
  double days() const { return static_cast<double>(n_bins) * bin_seconds / 86400.0; }
};

/// Bins [first, last] covered by the closed interval [t0, t1], or nullopt
/// when it misses the timeline.
std::optional<std::pair<std::size_t, std::size_t>> bin_range(Timestamp t0, Timestamp t1, Timestamp start,
                                                             double bin_seconds, std::size_t n_bins);

/// Per bin a vessel is moving if a trajectory touches the bin, otherwise
/// stationary if a stationary period does. Transits are the edges of
/// absent periods and of journeys that open or close in a transit area.
CountTimeline count_timeline(std::span<const Journey> journeys, const Period& period,
                             double bin_seconds = 240.0);

struct MeanWithSpread {
  double mean = 0.0;
  double spread = 0.0;  // standard deviation of the daily means
};

struct CountAverages {
  MeanWithSpread moving;      // full period
  MeanWithSpread stationary;  // central window
  MeanWithSpread total;       // central window
  Period stationary_window;
};

/// Averages over the selected groups (all when empty). Throws ConfigError
/// when the central window is longer than the timeline.
CountAverages average_counts(const CountTimeline& timeline, std::span<const int> groups = {},
                             double window_days = 21.0);

/// Transits per day through `area` (all areas when empty) with the spread
/// of the daily totals.
MeanWithSpread transit_rate(const CountTimeline& timeline, const std::string& area = {},
                            std::span<const int> groups = {});

/// Names of areas with at least one transit event, sorted.
std::vector<std::string> transit_areas(const CountTimeline& timeline);

struct CircularSummary {
  double mode_hours = 0.0;
  double mean_hours = 0.0;
  double std_hours = 0.0;  // circular standard deviation sqrt(-2 ln R)
};

/// Circular statistics of a 24 h histogram with equally wide bins.
CircularSummary circular_summary(std::span<const double> histogram);

struct DailyCycle {
  std::vector<double> moving;      // mean moving count per time-of-day bin
  std::vector<double> stationary;  // mean stationary count per time-of-day bin
  std::vector<double> entries;     // total entries per time-of-day bin
  std::vector<double> exits;
};

DailyCycle daily_cycle(const CountTimeline& timeline);

/// Circular mean of bearings in degrees, in [0, 360).
double circular_mean_deg(std::span<const double> bearings);

struct Crossing {
  geo::CellIndex cell;
  double duration = 0.0;  // s
  double mean_speed = 0.0;
  double bearing = 0.0;
};

struct TrajectoryRaster {
  std::vector<Crossing> crossings;
  double excluded_time = 0.0;
  std::size_t excluded_tracklets = 0;
};

/// Samples the trajectory every `step` metres and turns runs of samples in
/// one cell into crossings whose durations are normalized to the time spent
/// on tracklets that stay on water.
TrajectoryRaster rasterize_trajectory(const Trajectory& traj, const geo::GridSpec& grid,
                                      const geo::LandMask* mask = nullptr, double step = 100.0);

struct RasterStats {
  std::size_t trajectories = 0;
  std::size_t crossings = 0;
  std::size_t excluded_tracklets = 0;
  double excluded_time = 0.0;
  std::size_t stationary_resolved = 0;
  std::size_t stationary_unresolved = 0;
  std::size_t stationary_outside = 0;
  double resolved_vessel_time = 0.0;  // s, crossings plus moorings
};

class ActivityGrid {
 public:
  explicit ActivityGrid(const geo::GridSpec& grid);

  const geo::GridSpec& grid() const { return grid_; }
  void add(const TrajectoryRaster& raster);
  /// Adds a resolved period's duration to its idle cell; returns false when
  /// nothing was added.
  bool add(const StationaryPeriod& period);
  void add(const Journey& journey, const geo::LandMask* mask, RasterStats& stats);

  Eigen::ArrayXXd crossing_count;
  Eigen::ArrayXXd crossing_duration;
  Eigen::ArrayXXd speed_sum;
  Eigen::ArrayXXd bearing_sin;
  Eigen::ArrayXXd bearing_cos;
  Eigen::ArrayXXd mooring_duration;

 private:
  geo::GridSpec grid_;
};

/// Rasterizes all journeys; per-trajectory work runs on `threads` workers
/// and is accumulated in journey order.
ActivityGrid rasterize_journeys(std::span<const Journey> journeys, const geo::GridSpec& grid,
                                const geo::LandMask* mask, RasterStats& stats, unsigned threads = 1);

/// Cell areas in km^2, rows x cols.
Eigen::ArrayXXd cell_areas(const geo::GridSpec& grid);

/// Vessels per km^2: (crossing + mooring duration) / period / cell area.
Eigen::ArrayXXd density_map(const ActivityGrid& activity, const Period& period);
Eigen::ArrayXXd stationary_density(const ActivityGrid& activity, const Period& period);
Eigen::ArrayXXd crossings_per_day(const ActivityGrid& activity, const Period& period);
/// Mean crossing speed in m/s; NaN where nothing crossed.
Eigen::ArrayXXd mean_speed(const ActivityGrid& activity);
/// Circular-mean bearing in degrees; NaN where nothing crossed.
Eigen::ArrayXXd mean_bearing(const ActivityGrid& activity);

/// Wraps a layer as a raster; NaN becomes nodata.
AsciiGrid to_ascii_grid(const Eigen::ArrayXXd& layer, const geo::GridSpec& grid);

}  // namespace seatrace::metrics
