#pragma once

// End-to-end orchestration of the analysis stages.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seatrace/cleanse.hpp"
#include "seatrace/config.hpp"
#include "seatrace/errors.hpp"
#include "seatrace/journey.hpp"
#include "seatrace/metrics.hpp"
#include "seatrace/ports.hpp"
#include "seatrace/trajectory.hpp"
#include "seatrace/uncertainty.hpp"

namespace seatrace::pipeline {

/// A library error tagged with the stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message)
      : Error("[" + stage + "] " + message), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// Analysis window from the config, otherwise the whole UTC days spanned
/// by the records (one day from the epoch when there are none).
metrics::Period analysis_period(const config::RunConfig& config, std::span<const AisRecord> records);

/// Keeps movements apart when the silence between them is long enough for
/// a transit through a boundary gate other than Skagerrak and Kiel Canal.
cleanse::MergeBarrier transit_barrier(double t0_hours, std::vector<ingest::TransitArea> areas);

/// Reads "mmsi,gross_tonnage" lines; a non-numeric first line is a header.
journey::TonnageLookup read_tonnage(const std::filesystem::path& path);

struct Prepared {
  metrics::Period period;
  ingest::ReadStats read_stats;
  std::size_t outside_roi = 0;
  std::size_t on_land = 0;
  std::size_t no_mask_coverage = 0;
  std::size_t outside_window = 0;
  cleanse::CleanseOutput cleansed;
  std::vector<std::vector<Trajectory>> trajectories;  // per cleansed vessel
  std::shared_ptr<const geo::LandMask> mask;
  journey::TonnageLookup tonnage;
};

/// ROI and window filtering, cleansing and trajectory modelling.
Prepared prepare(const config::RunConfig& config, std::span<const AisRecord> records,
                 std::shared_ptr<const geo::LandMask> mask = nullptr);

uncertainty::CaseResult run_case(const config::RunConfig& config, const Prepared& prepared, journey::Case c);

/// One journey-construction run per requested case; df always included.
std::map<journey::Case, uncertainty::CaseResult> run_cases(const config::RunConfig& config,
                                                          const Prepared& prepared);

struct Analysis {
  Prepared prepared;
  std::map<journey::Case, uncertainty::CaseResult> cases;
  double window_days = 0.0;
  metrics::CountAverages averages;
  metrics::RasterStats raster_stats;
  std::unique_ptr<metrics::ActivityGrid> activity;
  Eigen::ArrayXXd density;
  std::vector<ports::PortArea> ports;
  std::vector<uncertainty::UncertaintyRow> uncertainty;
};

/// Runs every stage in memory without writing anything.
Analysis analyze(const config::RunConfig& config, std::span<const AisRecord> records,
                 std::shared_ptr<const geo::LandMask> mask = nullptr);

/// Executes the `run` command; writes all outputs under config.output_dir.
void cmd_run(const config::RunConfig& config);
/// Cleanses and models the input, then writes model_accuracy.csv.
trajectory::AccuracyReport cmd_validate(const config::RunConfig& config);
/// Reruns the pipeline on the rejected records left by a previous run.
uncertainty::RejectedReport cmd_rerun_rejected(const config::RunConfig& config);

}  // namespace seatrace::pipeline
