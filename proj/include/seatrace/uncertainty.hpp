#pragma once

// Systematic brackets from case variations and untracked/AIS-B fractions.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "seatrace/journey.hpp"
#include "seatrace/metrics.hpp"
#include "seatrace/model.hpp"

namespace seatrace::uncertainty {

struct UncertaintyConfig {
  double delta_dark = 0.21;
  double delta_dark_skagerrak = 0.13;
  double delta_dark_kiel = 0.0;
  double delta_aisb_all = 0.30;
  /// Indexed by VesselCategory.
  std::array<double, kCategoryCount> delta_aisb_category{0.11, 0.20, 0.13, 0.18, 0.005, 0.55};
  double delta_aisb_lt10k = 0.37;
  double delta_aisb_ge10k = 0.0;

  double delta_dark_for_area(const std::string& area) const;
  /// Throws ConfigError unless every fraction lies in [0, 1).
  void validate() const;
};

struct BracketedValue {
  double value = 0.0;
  double stat = 0.0;
  double syst_plus = 0.0;
  double syst_minus = 0.0;
};

/// delta / (1 - delta); throws ConfigError outside [0, 1).
double tilde(double delta);

/// Count bracket: plus from (df - hi) and the fractions, minus = df - low.
BracketedValue combine_counts(double n_df, double n_hi, double n_low, double delta_dark, double delta_aisb,
                              double stat = 0.0);

/// Rate bracket: plus from (df - low) and the fractions, minus = df - hi.
BracketedValue combine_rates(double r_df, double r_hi, double r_low, double delta_dark, double delta_aisb,
                             double stat = 0.0);

struct CaseResult {
  journey::Case which = journey::Case::Df;
  std::vector<Journey> journeys;
  metrics::CountTimeline timeline;
};

struct UncertaintyRow {
  std::string metric;    // N_total, N_moving, N_stationary or transits_per_day
  std::string category;  // vessel group or transit area
  BracketedValue value;
  double case_low = 0.0;
  double case_hi = 0.0;
};

/// Rows for all vessels, each category and size class, and each transit
/// area. Missing cases fall back to the df values.
std::vector<UncertaintyRow> uncertainty_table(const CaseResult& df, const CaseResult* low, const CaseResult* hi,
                                              const UncertaintyConfig& config, double window_days);

/// On-trajectory travel time of a rerun on rejected records against the
/// main run.
struct RejectedReport {
  std::size_t rejected_records = 0;
  std::size_t journeys = 0;
  std::size_t trajectories = 0;
  double travel_time_days = 0.0;
  double main_travel_time_days = 0.0;
  double ratio = 0.0;
};

RejectedReport compare_travel_time(std::span<const Journey> rejected_run, std::span<const Journey> main_run,
                                   std::size_t rejected_records);

}  // namespace seatrace::uncertainty
