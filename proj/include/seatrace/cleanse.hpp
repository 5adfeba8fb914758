#pragma once

// Rule-based message cleansing and movement segmentation.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "seatrace/ingest.hpp"
#include "seatrace/model.hpp"

namespace seatrace::cleanse {

struct CleanseParams {
  double static_square_m = 400.0;
  double duplicate_max_dt_s = 5.0;
  double duplicate_max_speed_kmh = 1.0;
  double duplicate_max_distance_m = 1.0;
  double stationary_speed_kn = 0.5;
  double max_gap_s = 48.0 * 3600.0;
  double max_jump_m = 750e3;
  double max_speed_kn = 50.0;
  double max_accel = 1.0;  // m/s^2
  double combine_gap_s = 120.0;
};

struct CleanseReport {
  std::size_t input_records = 0;
  std::size_t input_vessels = 0;
  std::size_t exact_duplicates = 0;
  std::size_t static_vessels = 0;
  std::size_t static_vessel_records = 0;
  std::size_t static_positions_corrected = 0;
  std::size_t low_speed_duplicates = 0;
  std::size_t segmentation_removed_pass1 = 0;
  std::size_t segmentation_removed_pass2 = 0;
  std::size_t stationary_pass1 = 0;
  std::size_t movements_pass1 = 0;
  std::size_t movements_pass2 = 0;
  std::size_t outliers_speed = 0;
  std::size_t outliers_accel = 0;
  std::size_t area_filtered_movements = 0;
  std::size_t area_filtered_records = 0;
  std::size_t merges = 0;
  std::size_t dropped_vessels = 0;
  std::size_t dropped_vessel_records = 0;
  std::size_t final_vessels = 0;
  std::size_t final_movements = 0;
  std::size_t kept_in_movements = 0;
  std::size_t stationary_records = 0;
  /// Records removed by the speed/acceleration rules, in vessel then time order.
  std::vector<AisRecord> rejected;

  std::size_t removed_total() const;
  CleanseReport& operator+=(const CleanseReport& other);
};

/// Inter-record speed in m/s; coincident times give 0 for identical
/// positions and +inf otherwise.
double pair_speed(const AisRecord& a, const AisRecord& b);

/// True when the lat/lon bounding box has both metric extents below `side_m`.
bool fits_in_square(std::span<const AisRecord> records, double side_m);

/// Splits records into per-vessel lists (ascending MMSI, stable time sort)
/// and drops exact (time, position, kind) repeats. Returns the repeat count.
std::size_t group_by_vessel(std::span<const AisRecord> records,
                            std::vector<std::vector<AisRecord>>& vessels);

/// Drops every vessel confined to a `side_m` square over the whole period.
/// Returns (vessels removed, records removed).
std::pair<std::size_t, std::size_t> remove_static_vessels(std::vector<std::vector<AisRecord>>& vessels,
                                                          double side_m);

/// Moves each static report onto the great circle between its enclosing
/// position reports, interpolated in time. Returns the number corrected.
std::size_t correct_static_positions(std::vector<AisRecord>& records);

std::vector<AisRecord> remove_duplicates(std::span<const AisRecord> records,
                                         const CleanseParams& params = {});

struct Segmentation {
  std::vector<Movement> movements;
  std::vector<AisRecord> stationary;
  std::vector<AisRecord> removed;
};

/// One splitting pass over time-sorted records of a single vessel.
Segmentation segment_movements(std::span<const AisRecord> records,
                               std::span<const ingest::TransitArea> areas,
                               const CleanseParams& params = {});

struct OutlierResult {
  std::vector<Movement> movements;
  std::vector<AisRecord> rejected;
  std::size_t by_speed = 0;
  std::size_t by_accel = 0;
};

/// Central-difference acceleration at interior record i (m/s^2).
double central_acceleration(std::span<const AisRecord> records, std::size_t i);

OutlierResult remove_outliers(std::vector<Movement> movements, const CleanseParams& params = {});

struct AreaFilterResult {
  std::vector<Movement> movements;
  std::vector<AisRecord> stationary;
  std::size_t reclassified_movements = 0;
};

AreaFilterResult area_filter_movements(std::vector<Movement> movements,
                                       const CleanseParams& params = {});

/// Returns true when two movements must not be merged.
using MergeBarrier = std::function<bool(const Movement& earlier, const Movement& later)>;

struct CombineResult {
  std::vector<Movement> movements;
  std::vector<AisRecord> dropped;
  std::size_t merges = 0;
};

CombineResult combine_movements(std::vector<Movement> movements, const CleanseParams& params = {},
                                const MergeBarrier& barrier = {});

struct DestinationReport {
  Timestamp time = 0;
  std::string destination;
};

struct VesselData {
  Mmsi mmsi = 0;
  std::vector<Movement> movements;
  std::vector<AisRecord> stationary;  // time-sorted
  std::optional<int> vessel_type;
  std::vector<DestinationReport> destinations;  // time-sorted
};

struct CleanseOutput {
  std::vector<VesselData> vessels;  // ascending MMSI
  CleanseReport report;
};

/// Full cleansing chain on ROI-filtered records.
CleanseOutput run_cleanse(std::span<const AisRecord> records,
                          std::span<const ingest::TransitArea> areas,
                          const CleanseParams& params = {}, const MergeBarrier& barrier = {},
                          unsigned threads = 1);

}  // namespace seatrace::cleanse
