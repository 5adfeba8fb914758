#pragma once

// Run configuration with the published defaults.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "seatrace/cleanse.hpp"
#include "seatrace/ingest.hpp"
#include "seatrace/journey.hpp"
#include "seatrace/model.hpp"
#include "seatrace/ports.hpp"
#include "seatrace/trajectory.hpp"
#include "seatrace/uncertainty.hpp"

namespace seatrace::config {

struct RunConfig {
  std::filesystem::path input;
  std::optional<std::filesystem::path> land_mask;
  std::optional<std::filesystem::path> tonnage;  // CSV: mmsi,gross_tonnage
  std::filesystem::path output_dir = "out";

  double lat_min = 53.0, lat_max = 66.0, lon_min = 9.0, lon_max = 32.0;
  double timezone_split_lon = 19.5;
  double land_threshold_m = 2.0;
  double grid_dlat_arcsec = 15.0;
  double grid_dlon_arcsec = 30.0;

  /// Analysis window; whole UTC days around the data when unset.
  std::optional<Timestamp> start;
  std::optional<Timestamp> end;

  double d_tol = 100.0;
  trajectory::SpeedModelParams speed_model;
  cleanse::CleanseParams cleanse;
  journey::TransitPolicy policy;  // df values; low/hi derive from it
  double low_case_t0_hours = 1.0;
  double bin_seconds = 240.0;
  /// Central window for stationary averages; unset means 21 days clamped to
  /// the analysis period.
  std::optional<double> stationary_window_days;
  bool dump_trajectories = false;
  double raster_step_m = 100.0;
  ports::PortParams ports;
  uncertainty::UncertaintyConfig uncertainty;
  std::vector<journey::Case> cases{journey::Case::Low, journey::Case::Df, journey::Case::Hi};
  unsigned threads = 1;

  ingest::RoiSpec roi() const;
  geo::GridSpec grid() const;
  journey::TransitPolicy policy_for(journey::Case c) const;
  /// Effective stationary window for a period of `period_days`.
  double window_days(double period_days) const;
  /// Throws ConfigError on inconsistent values.
  void validate() const;
};

/// Parses "2024-08-01T00:00:00Z" style UTC times or integer epoch seconds.
Timestamp parse_time(const nlohmann::json& value);
std::string format_time(Timestamp t);

/// Keys not present keep their defaults; unknown keys raise ConfigError.
RunConfig from_json(const nlohmann::json& j);
RunConfig load(const std::filesystem::path& path);

/// Effective values, stable key order.
nlohmann::ordered_json to_json(const RunConfig& config);

std::vector<journey::Case> parse_cases(std::string_view s);

}  // namespace seatrace::config
