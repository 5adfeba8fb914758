#pragma once

// Journey assembly: gap classification between consecutive trajectories.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "seatrace/cleanse.hpp"
#include "seatrace/ingest.hpp"
#include "seatrace/model.hpp"

namespace seatrace::journey {

enum class Case { Low, Df, Hi };

std::string_view to_string(Case c);
Case parse_case(std::string_view s);

struct TransitPolicy {
  double t0_hours = 6.0;
  double kiel_idle_threshold_s = 24.0 * 3600.0;
  double kiel_buffer_m = 400.0;
  ingest::AreaVariant area_variant = ingest::AreaVariant::Default;
  std::size_t max_gap_records = 3;        // more records than this means stationary
  double resolved_distance_m = 1000.0;    // idle position counts as known below this

  /// low: large areas with t0 = 1 h; df: default; hi: small areas.
  static TransitPolicy for_case(Case c);
};

/// Gap threshold in hours, t0 (max speed / 10 kn)^-4; +inf when both speeds are zero.
double transit_time_threshold(double v_exit_kn, double v_entry_kn, double t0_hours);

/// True inside the Kiel Canal box grown by `buffer_m` on every side.
bool in_kiel_zone(const GeoPoint& p, const ingest::TransitArea& kiel, double buffer_m);

/// Decides whether the silence between two trajectories of one vessel is a
/// stationary or an absent period. `gap_records` counts every record
/// received strictly between them.
Leg classify_gap(const Trajectory& prev, const Trajectory& next, std::size_t gap_records,
                 const TransitPolicy& policy, std::span<const ingest::TransitArea> areas);

using TonnageLookup = std::unordered_map<Mmsi, double>;

/// Builds the journey of one vessel from its cleansed data and the
/// trajectories of its movements (same order).
Journey build_journey(const cleanse::VesselData& vessel, std::span<const Trajectory> trajectories,
                      const TransitPolicy& policy, std::span<const ingest::TransitArea> areas,
                      std::optional<double> gross_tonnage = std::nullopt);

/// Clips legs to [analysis_start, analysis_end]; beyond the first and last
/// record the vessel is absent, so nothing is extrapolated.
Journey apply_edge_rule(Journey journey, Timestamp analysis_start, Timestamp analysis_end);

std::vector<Journey> build_journeys(std::span<const cleanse::VesselData> vessels,
                                    std::span<const std::vector<Trajectory>> trajectories,
                                    const TransitPolicy& policy, const TonnageLookup& tonnage = {},
                                    unsigned threads = 1);

/// Total on-trajectory time over all journeys, in seconds.
double travel_time(std::span<const Journey> journeys);

}  // namespace seatrace::journey
