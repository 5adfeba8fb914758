#pragma once

// Domain types shared by every stage of the pipeline.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace seatrace {

using Mmsi = std::uint32_t;
/// UTC seconds since the UNIX epoch.
using Timestamp = std::int64_t;

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  /// Validates the latitude and wraps the longitude into [-180, 180).
  static GeoPoint checked(double lat, double lon);

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

enum class RecordKind { PositionReport, StaticReport };

struct AisRecord {
  Mmsi mmsi = 0;
  Timestamp time = 0;
  GeoPoint pos;
  RecordKind kind = RecordKind::PositionReport;
  std::optional<double> sog;  // knots, position reports only
  std::optional<int> vessel_type;
  std::optional<std::string> destination;

  friend bool operator==(const AisRecord&, const AisRecord&) = default;
};

enum class VesselCategory {
  PassengerHighSpeed,
  LawEnforcementMilitary,
  Cargo,
  PilotTugRescueDiving,
  Tanker,
  OthersIncludingFishing,
};

inline constexpr int kCategoryCount = 6;

std::string_view to_string(VesselCategory c);

/// Maps an AIS ship-type code onto the six reporting categories.
/// Absent codes map to OthersIncludingFishing; codes outside [0, 99] throw.
VesselCategory categorize(std::optional<int> vessel_type);

/// Most frequently reported type code over `records`; ties go to the code
/// reported first.
std::optional<int> dominant_vessel_type(std::span<const AisRecord> records);

enum class SizeClass { Unknown, LT10k, GE10k };
inline constexpr int kSizeClassCount = 3;

std::string_view to_string(SizeClass s);
SizeClass size_class(std::optional<double> gross_tonnage);

struct Movement {
  Mmsi mmsi = 0;
  std::vector<AisRecord> records;

  Timestamp start_time() const { return records.front().time; }
  Timestamp end_time() const { return records.back().time; }
};

/// Simplified geometric track. `source_index[k]` is the index of the
/// movement record that became waypoint k.
struct Route {
  std::vector<GeoPoint> waypoints;
  std::vector<std::size_t> source_index;
  double d_tol = 100.0;
};

struct SpeedPoint {
  double path_distance = 0.0;  // m from route start
  double time = 0.0;           // s from trajectory start
  double speed = 0.0;          // m/s
};

struct Trajectory {
  Mmsi mmsi = 0;
  Timestamp start_time = 0;
  Timestamp end_time = 0;
  Route route;
  /// Cumulative great-circle length at each waypoint.
  std::vector<double> waypoint_distance;
  std::vector<SpeedPoint> speed_points;

  double length() const { return waypoint_distance.empty() ? 0.0 : waypoint_distance.back(); }
  double duration() const { return static_cast<double>(end_time - start_time); }
};

struct StationaryPeriod {
  Mmsi mmsi = 0;
  Timestamp start_time = 0;
  Timestamp end_time = 0;
  GeoPoint idle_pos;
  bool position_resolved = false;
};

struct AbsentPeriod {
  Mmsi mmsi = 0;
  Timestamp start_time = 0;
  Timestamp end_time = 0;
  std::optional<std::string> exit_area;
  std::optional<std::string> entry_area;
};

using Leg = std::variant<Trajectory, StationaryPeriod, AbsentPeriod>;

Timestamp leg_start(const Leg& leg);
Timestamp leg_end(const Leg& leg);

struct Journey {
  Mmsi mmsi = 0;
  VesselCategory category = VesselCategory::OthersIncludingFishing;
  std::optional<double> gross_tonnage;
  std::vector<Leg> legs;
  /// Transit area holding the first trajectory start when the journey opens
  /// with a trajectory; likewise for the last trajectory end.
  std::optional<std::string> initial_entry_area;
  std::optional<std::string> final_exit_area;

  Timestamp start_time() const { return legs.empty() ? 0 : leg_start(legs.front()); }
  Timestamp end_time() const { return legs.empty() ? 0 : leg_end(legs.back()); }
};

}  // namespace seatrace
