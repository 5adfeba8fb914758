#pragma once

// Synthetic AIS traffic with known ground truth, for end-to-end checks.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "seatrace/config.hpp"
#include "seatrace/model.hpp"

namespace seatrace::synthetic {

struct SyntheticParams {
  std::size_t vessels = 10;
  double days = 2.0;
  double jitter_m = 0.0;  // uniform position noise radius
  std::uint64_t seed = 1;
  bool skagerrak_absence = true;  // vessel 0 leaves and re-enters at Skagerrak
  bool moorings = true;
  Timestamp start = 1722470400;  // 2024-08-01T00:00:00Z
  Timestamp report_interval = 60;
  Timestamp static_interval = 360;
};

enum class TruthState { Moving, Stationary, Absent };

struct TruthInterval {
  Mmsi mmsi = 0;
  TruthState state = TruthState::Moving;
  Timestamp start = 0;
  Timestamp end = 0;
  std::optional<std::string> area;  // absences only
};

struct SyntheticData {
  std::vector<AisRecord> records;  // ordered by time, then MMSI
  std::vector<TruthInterval> truth;  // per vessel, in time order
  std::vector<std::pair<Mmsi, double>> tonnage;
  Timestamp start = 0;
  Timestamp end = 0;  // whole days after start
};

SyntheticData generate(const SyntheticParams& params);

/// Config matching the generated scene: a reduced ROI, a coarse grid and
/// a stationary window as long as the period.
config::RunConfig scene_config(const SyntheticParams& params, const std::filesystem::path& input,
                               const std::filesystem::path& tonnage);

/// Writes records.jsonl, tonnage.csv, truth.json and config.json into `dir`.
void write_scene(const SyntheticData& data, const SyntheticParams& params, const std::filesystem::path& dir);

}  // namespace seatrace::synthetic
