#include "seatrace/uncertainty.hpp"

#include <algorithm>
#include <cmath>

#include "seatrace/errors.hpp"
#include "seatrace/ingest.hpp"

namespace seatrace::uncertainty {

double UncertaintyConfig::delta_dark_for_area(const std::string& area) const {
  if (area == ingest::kSkagerrak) return delta_dark_skagerrak;
  if (area == ingest::kKielCanal) return delta_dark_kiel;
  return delta_dark;
}

void UncertaintyConfig::validate() const {
  auto check = [](double d) {
    if (!(d >= 0.0 && d < 1.0)) throw ConfigError("fraction outside [0, 1): " + std::to_string(d));
  };
  check(delta_dark);
  check(delta_dark_skagerrak);
  check(delta_dark_kiel);
  check(delta_aisb_all);
  check(delta_aisb_lt10k);
  check(delta_aisb_ge10k);
  for (double d : delta_aisb_category) check(d);
}

double tilde(double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) throw ConfigError("fraction outside [0, 1): " + std::to_string(delta));
  return delta / (1.0 - delta);
}

namespace {

BracketedValue bracket(double df, double plus_case, double minus_case, double delta_dark, double delta_aisb,
                       double stat) {
  const double td = tilde(delta_dark), ta = tilde(delta_aisb);
  BracketedValue b;
  b.value = df;
  b.stat = stat;
  b.syst_plus = std::sqrt((df - plus_case) * (df - plus_case) + (td * td + ta * ta) * df * df);
  b.syst_minus = std::max(0.0, df - minus_case);
  return b;
}

}  // namespace

BracketedValue combine_counts(double n_df, double n_hi, double n_low, double delta_dark, double delta_aisb,
                              double stat) {
  return bracket(n_df, n_hi, n_low, delta_dark, delta_aisb, stat);
}

BracketedValue combine_rates(double r_df, double r_hi, double r_low, double delta_dark, double delta_aisb,
                             double stat) {
  return bracket(r_df, r_low, r_hi, delta_dark, delta_aisb, stat);
}

namespace {

struct Selection {
  std::string name;
  std::vector<int> groups;
  double delta_aisb;
};

std::vector<Selection> selections(const UncertaintyConfig& cfg) {
  std::vector<Selection> out;
  out.push_back({"All", {}, cfg.delta_aisb_all});
  for (int c = 0; c < kCategoryCount; ++c) {
    Selection s{std::string(to_string(static_cast<VesselCategory>(c))), {}, cfg.delta_aisb_category[c]};
    for (int z = 0; z < kSizeClassCount; ++z) {
      s.groups.push_back(metrics::group_index(static_cast<VesselCategory>(c), static_cast<SizeClass>(z)));
    }
    out.push_back(std::move(s));
  }
  for (const auto& [size, delta] :
       {std::pair{SizeClass::LT10k, cfg.delta_aisb_lt10k}, std::pair{SizeClass::GE10k, cfg.delta_aisb_ge10k}}) {
    Selection s{"GT" + std::string(to_string(size)), {}, delta};
    for (int c = 0; c < kCategoryCount; ++c) {
      s.groups.push_back(metrics::group_index(static_cast<VesselCategory>(c), size));
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::vector<UncertaintyRow> uncertainty_table(const CaseResult& df, const CaseResult* low, const CaseResult* hi,
                                              const UncertaintyConfig& config, double window_days) {
  config.validate();
  const CaseResult& lo = low ? *low : df;
  const CaseResult& hc = hi ? *hi : df;
  std::vector<UncertaintyRow> rows;
  for (const auto& sel : selections(config)) {
    const auto a_df = metrics::average_counts(df.timeline, sel.groups, window_days);
    const auto a_lo = metrics::average_counts(lo.timeline, sel.groups, window_days);
    const auto a_hi = metrics::average_counts(hc.timeline, sel.groups, window_days);
    auto add = [&](const char* metric, const metrics::MeanWithSpread& d, double l, double h) {
      rows.push_back({metric, sel.name, combine_counts(d.mean, h, l, config.delta_dark, sel.delta_aisb, d.spread),
                      l, h});
    };
    add("N_total", a_df.total, a_lo.total.mean, a_hi.total.mean);
    add("N_moving", a_df.moving, a_lo.moving.mean, a_hi.moving.mean);
    add("N_stationary", a_df.stationary, a_lo.stationary.mean, a_hi.stationary.mean);
  }
  std::vector<std::string> areas{""};
  for (const auto* c : {&df, &lo, &hc}) {
    for (auto& a : metrics::transit_areas(c->timeline)) {
      if (std::find(areas.begin(), areas.end(), a) == areas.end()) areas.push_back(a);
    }
  }
  std::sort(areas.begin() + 1, areas.end());
  for (const auto& area : areas) {
    const auto r_df = metrics::transit_rate(df.timeline, area);
    const double r_lo = metrics::transit_rate(lo.timeline, area).mean;
    const double r_hi = metrics::transit_rate(hc.timeline, area).mean;
    const double dark = area.empty() ? config.delta_dark : config.delta_dark_for_area(area);
    rows.push_back({"transits_per_day", area.empty() ? "All" : area,
                    combine_rates(r_df.mean, r_hi, r_lo, dark, config.delta_aisb_all, r_df.spread), r_lo, r_hi});
  }
  return rows;
}

RejectedReport compare_travel_time(std::span<const Journey> rejected_run, std::span<const Journey> main_run,
                                   std::size_t rejected_records) {
  RejectedReport r;
  r.rejected_records = rejected_records;
  r.journeys = rejected_run.size();
  for (const auto& j : rejected_run) {
    for (const auto& leg : j.legs) r.trajectories += std::holds_alternative<Trajectory>(leg) ? 1 : 0;
  }
  r.travel_time_days = journey::travel_time(rejected_run) / 86400.0;
  r.main_travel_time_days = journey::travel_time(main_run) / 86400.0;
  r.ratio = r.main_travel_time_days > 0.0 ? r.travel_time_days / r.main_travel_time_days : 0.0;
  return r;
}

}  // namespace seatrace::uncertainty
