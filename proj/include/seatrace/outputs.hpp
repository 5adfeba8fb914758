#pragma once

// File writers for the run products and the run manifest.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "seatrace/cleanse.hpp"
#include "seatrace/geo.hpp"
#include "seatrace/metrics.hpp"
#include "seatrace/ports.hpp"
#include "seatrace/trajectory.hpp"
#include "seatrace/uncertainty.hpp"

namespace seatrace::outputs {

/// Hex SHA-256 of a file's bytes; throws IoError if unreadable.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_string(const std::string& data);

/// Shortest round-trip decimal form, so identical doubles print identically.
std::string format_number(double v);

void write_text(const std::filesystem::path& path, const std::string& text);

std::string counts_csv(const metrics::CountTimeline& timeline);
std::string uncertainty_csv(std::span<const uncertainty::UncertaintyRow> rows);
std::string daily_cycle_csv(const metrics::DailyCycle& cycle);
std::string ports_csv(std::span<const ports::PortArea> ports);
std::string model_accuracy_csv(const trajectory::AccuracyReport& report);

nlohmann::ordered_json cleanse_report_json(const cleanse::CleanseReport& report);
nlohmann::ordered_json rejected_report_json(const uncertainty::RejectedReport& report);
nlohmann::ordered_json trajectory_json(const Trajectory& traj);
nlohmann::ordered_json journey_json(const Journey& journey);

/// Outer rings counter-clockwise, holes clockwise, in lon/lat.
std::vector<std::vector<GeoPoint>> port_rings(const ports::PortArea& port, const geo::GridSpec& grid);
nlohmann::ordered_json ports_geojson(std::span<const ports::PortArea> ports, const geo::GridSpec& grid);

struct StageRecord {
  std::string name;
  std::string status;  // ok, failed, skipped
  std::string message;
};

class Manifest {
 public:
  Manifest(nlohmann::ordered_json effective_config, std::vector<std::filesystem::path> inputs);

  void stage(const std::string& name, const std::string& status, const std::string& message = {});
  void output(const std::string& relative_path);
  nlohmann::ordered_json to_json() const;
  void write(const std::filesystem::path& dir) const;

 private:
  nlohmann::ordered_json config_;
  std::vector<std::pair<std::string, std::string>> inputs_;  // path, sha256
  std::vector<StageRecord> stages_;
  std::vector<std::string> outputs_;
};

inline constexpr const char* kVersion = "1.0.0";

}  // namespace seatrace::outputs
