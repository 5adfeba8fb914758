#include "seatrace/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "seatrace/ascii_grid.hpp"
#include "seatrace/ingest.hpp"
#include "seatrace/outputs.hpp"
#include "seatrace/parallel.hpp"

namespace seatrace::pipeline {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

metrics::Period analysis_period(const config::RunConfig& config, std::span<const AisRecord> records) {
  Timestamp lo = 0, hi = 0;
  if (!records.empty()) {
    const auto [mn, mx] = std::minmax_element(records.begin(), records.end(),
                                              [](const AisRecord& a, const AisRecord& b) { return a.time < b.time; });
    lo = mn->time;
    hi = mx->time;
  }
  auto floor_day = [](Timestamp t) { return (t >= 0 ? t / 86400 : (t - 86399) / 86400) * 86400; };
  metrics::Period p;
  p.start = config.start ? *config.start : floor_day(lo);
  p.end = config.end ? *config.end : floor_day(hi) + 86400;
  if (p.end <= p.start) throw ConfigError("analysis period is empty");
  return p;
}

cleanse::MergeBarrier transit_barrier(double t0_hours, std::vector<ingest::TransitArea> areas) {
  return [t0_hours, areas = std::move(areas)](const Movement& earlier, const Movement& later) {
    const auto exit_area = ingest::in_transit_area(earlier.records.back().pos, areas);
    const auto entry_area = ingest::in_transit_area(later.records.front().pos, areas);
    if (!exit_area && !entry_area) return false;
    auto gate = [](const std::optional<std::string>& a) {
      return a && (*a == ingest::kSkagerrak || *a == ingest::kKielCanal);
    };
    if (gate(exit_area) || gate(entry_area)) return false;
    auto end_speed = [](const AisRecord& a, const AisRecord& b) {
      const double v = cleanse::pair_speed(a, b) / geo::kKnot;
      return std::isfinite(v) ? v : 0.0;
    };
    const auto& e = earlier.records;
    const auto& l = later.records;
    const double v_exit = e.size() >= 2 ? end_speed(e[e.size() - 2], e.back()) : 0.0;
    const double v_entry = l.size() >= 2 ? end_speed(l[0], l[1]) : 0.0;
    const auto gap = static_cast<double>(later.start_time() - earlier.end_time());
    return gap > journey::transit_time_threshold(v_exit, v_entry, t0_hours) * 3600.0;
  };
}

journey::TonnageLookup read_tonnage(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open tonnage file " + path.string());
  journey::TonnageLookup out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw FormatError("tonnage line " + std::to_string(lineno) + " lacks a comma");
    Mmsi mmsi = 0;
    const auto* first = line.data();
    const auto r = std::from_chars(first, first + comma, mmsi);
    if (r.ec != std::errc{} || r.ptr != first + comma) {
      if (lineno == 1) continue;  // header
      throw FormatError("bad MMSI on tonnage line " + std::to_string(lineno));
    }
    try {
      out[mmsi] = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw FormatError("bad gross tonnage on line " + std::to_string(lineno));
    }
  }
  return out;
}

namespace {

Prepared cleanse_input(const config::RunConfig& config, std::span<const AisRecord> records,
                       std::shared_ptr<const geo::LandMask> mask) {
  Prepared p;
  p.mask = std::move(mask);
  auto roi = config.roi();
  roi.land_mask = p.mask;
  auto filtered = ingest::filter_roi(records, roi);
  p.outside_roi = filtered.outside_roi;
  p.on_land = filtered.on_land;
  p.no_mask_coverage = filtered.no_mask_coverage;
  p.period = analysis_period(config, filtered.records);
  auto windowed = ingest::filter_time_window(filtered.records, p.period.start, p.period.end);
  p.outside_window = filtered.records.size() - windowed.size();
  p.cleansed = cleanse::run_cleanse(windowed, roi.areas, config.cleanse,
                                    transit_barrier(config.policy.t0_hours, roi.areas), config.threads);
  return p;
}

void model_trajectories(const config::RunConfig& config, Prepared& p) {
  const auto& vessels = p.cleansed.vessels;
  p.trajectories.assign(vessels.size(), {});
  parallel_for(vessels.size(), config.threads, [&](std::size_t i) {
    auto& out = p.trajectories[i];
    out.reserve(vessels[i].movements.size());
    for (const auto& m : vessels[i].movements) {
      out.push_back(trajectory::build_trajectory(m, config.d_tol, config.speed_model));
    }
  });
}

}  // namespace

Prepared prepare(const config::RunConfig& config, std::span<const AisRecord> records,
                 std::shared_ptr<const geo::LandMask> mask) {
  config.validate();
  auto p = cleanse_input(config, records, std::move(mask));
  model_trajectories(config, p);
  return p;
}

uncertainty::CaseResult run_case(const config::RunConfig& config, const Prepared& prepared, journey::Case c) {
  uncertainty::CaseResult r;
  r.which = c;
  r.journeys = journey::build_journeys(prepared.cleansed.vessels, prepared.trajectories, config.policy_for(c),
                                       prepared.tonnage, config.threads);
  for (auto& j : r.journeys) j = journey::apply_edge_rule(std::move(j), prepared.period.start, prepared.period.end);
  r.timeline = metrics::count_timeline(r.journeys, prepared.period, config.bin_seconds);
  return r;
}

std::map<journey::Case, uncertainty::CaseResult> run_cases(const config::RunConfig& config,
                                                          const Prepared& prepared) {
  std::vector<journey::Case> cases = config.cases;
  if (std::find(cases.begin(), cases.end(), journey::Case::Df) == cases.end()) cases.push_back(journey::Case::Df);
  std::map<journey::Case, uncertainty::CaseResult> out;
  for (const auto c : cases) out.emplace(c, run_case(config, prepared, c));
  return out;
}

namespace {

ports::DestinationLookup destinations_of(const Prepared& p) {
  ports::DestinationLookup out;
  for (const auto& v : p.cleansed.vessels) {
    if (!v.destinations.empty()) out[v.mmsi] = v.destinations;
  }
  return out;
}

const uncertainty::CaseResult* find_case(const std::map<journey::Case, uncertainty::CaseResult>& cases,
                                         journey::Case c) {
  auto it = cases.find(c);
  return it == cases.end() ? nullptr : &it->second;
}

void compute_metrics(const config::RunConfig& config, Analysis& a) {
  const auto& df = a.cases.at(journey::Case::Df);
  a.window_days = config.window_days(a.prepared.period.days());
  a.averages = metrics::average_counts(df.timeline, {}, a.window_days);
  const auto grid = config.grid();
  a.activity = std::make_unique<metrics::ActivityGrid>(
      metrics::rasterize_journeys(df.journeys, grid, a.prepared.mask.get(), a.raster_stats, config.threads));
  a.density = metrics::density_map(*a.activity, a.prepared.period);
}

void compute_ports(const config::RunConfig& config, Analysis& a) {
  const auto grid = config.grid();
  a.ports = ports::find_ports(a.density, grid, config.ports, a.prepared.mask.get());
  ports::port_arrivals(a.ports, a.cases.at(journey::Case::Df).journeys, grid, a.prepared.period.days(),
                       destinations_of(a.prepared));
  if (a.prepared.mask) ports::coast_distances(a.ports, *a.prepared.mask);
}

void compute_uncertainty(const config::RunConfig& config, Analysis& a) {
  a.uncertainty = uncertainty::uncertainty_table(a.cases.at(journey::Case::Df), find_case(a.cases, journey::Case::Low),
                                                 find_case(a.cases, journey::Case::Hi), config.uncertainty,
                                                 a.window_days);
}

}  // namespace

Analysis analyze(const config::RunConfig& config, std::span<const AisRecord> records,
                 std::shared_ptr<const geo::LandMask> mask) {
  Analysis a;
  a.prepared = prepare(config, records, std::move(mask));
  a.cases = run_cases(config, a.prepared);
  compute_metrics(config, a);
  compute_ports(config, a);
  compute_uncertainty(config, a);
  return a;
}

namespace {

class StageRunner {
 public:
  StageRunner(outputs::Manifest& manifest, fs::path dir) : manifest_(manifest), dir_(std::move(dir)) {}

  template <class F>
  void operator()(const std::string& name, F&& body) {
    try {
      body();
    } catch (const Error& e) {
      fail(name, e.what());
    } catch (const std::exception& e) {
      fail(name, e.what());
    }
    manifest_.stage(name, "ok");
  }

  void write(const std::string& file, const std::string& text) {
    outputs::write_text(dir_ / file, text);
    manifest_.output(file);
  }

 private:
  [[noreturn]] void fail(const std::string& name, const std::string& what) {
    manifest_.stage(name, "failed", what);
    try {
      manifest_.write(dir_);
    } catch (const Error&) {
    }
    throw StageError(name, what);
  }

  outputs::Manifest& manifest_;
  fs::path dir_;
};

std::shared_ptr<const geo::LandMask> load_mask(const config::RunConfig& config) {
  if (!config.land_mask) return nullptr;
  return std::make_shared<const geo::LandMask>(read_ascii_grid(*config.land_mask), config.land_threshold_m);
}

std::vector<fs::path> input_files(const config::RunConfig& config) {
  std::vector<fs::path> files{config.input};
  if (config.land_mask) files.push_back(*config.land_mask);
  if (config.tonnage) files.push_back(*config.tonnage);
  return files;
}

void require_input(const config::RunConfig& config) {
  if (config.input.empty()) throw ConfigError("no input record file given");
  if (!fs::exists(config.input)) throw IoError("input record file not found: " + config.input.string());
}

ordered_json mean_json(const metrics::MeanWithSpread& m) { return {{"mean", m.mean}, {"spread", m.spread}}; }

ordered_json circular_json(const metrics::CircularSummary& s) {
  return {{"mode_hours", s.mode_hours}, {"circular_mean_hours", s.mean_hours}, {"circular_std_hours", s.std_hours}};
}

std::string dump_lines(const std::vector<ordered_json>& items) {
  std::string out;
  for (const auto& j : items) out += j.dump() + "\n";
  return out;
}

ordered_json summary_json(const Analysis& a) {
  const auto& p = a.prepared;
  const auto& df = a.cases.at(journey::Case::Df);
  ordered_json j;
  j["period"] = {{"start", config::format_time(p.period.start)},
                 {"end", config::format_time(p.period.end)},
                 {"start_epoch", p.period.start},
                 {"end_epoch", p.period.end},
                 {"days", p.period.days()}};
  j["stationary_window"] = {{"days", a.window_days},
                            {"start", config::format_time(a.averages.stationary_window.start)},
                            {"end", config::format_time(a.averages.stationary_window.end)}};
  j["input"] = {{"lines", p.read_stats.lines},
                {"records", p.read_stats.records},
                {"malformed", p.read_stats.skipped},
                {"gaps_over_400s", p.read_stats.gaps_over_400s},
                {"max_gap_s", p.read_stats.max_gap},
                {"outside_roi", p.outside_roi},
                {"on_land", p.on_land},
                {"no_mask_coverage", p.no_mask_coverage},
                {"outside_window", p.outside_window}};
  j["counts"] = {{"moving_full_period", mean_json(a.averages.moving)},
                 {"stationary_central_window", mean_json(a.averages.stationary)},
                 {"total_central_window", mean_json(a.averages.total)}};
  auto& rates = j["transits_per_day"] = ordered_json::object();
  rates["All"] = mean_json(metrics::transit_rate(df.timeline));
  for (const auto& area : metrics::transit_areas(df.timeline)) rates[area] = mean_json(metrics::transit_rate(df.timeline, area));
  const auto cycle = metrics::daily_cycle(df.timeline);
  std::vector<double> transits(cycle.entries.size());
  for (std::size_t i = 0; i < transits.size(); ++i) transits[i] = cycle.entries[i] + cycle.exits[i];
  j["daily_cycle"] = {{"moving", circular_json(metrics::circular_summary(cycle.moving))},
                      {"transits", circular_json(metrics::circular_summary(transits))}};
  std::size_t trajectories = 0, stationary = 0, absent = 0;
  for (const auto& jr : df.journeys) {
    for (const auto& leg : jr.legs) {
      trajectories += std::holds_alternative<Trajectory>(leg);
      stationary += std::holds_alternative<StationaryPeriod>(leg);
      absent += std::holds_alternative<AbsentPeriod>(leg);
    }
  }
  j["journeys"] = {{"journeys", df.journeys.size()},
                   {"trajectories", trajectories},
                   {"stationary_periods", stationary},
                   {"absent_periods", absent},
                   {"travel_time_days", journey::travel_time(df.journeys) / 86400.0}};
  const auto& rs = a.raster_stats;
  j["raster"] = {{"trajectories", rs.trajectories},
                 {"crossings", rs.crossings},
                 {"excluded_tracklets", rs.excluded_tracklets},
                 {"excluded_time_s", rs.excluded_time},
                 {"stationary_resolved", rs.stationary_resolved},
                 {"stationary_unresolved", rs.stationary_unresolved},
                 {"stationary_outside", rs.stationary_outside},
                 {"mean_resolved_vessels", rs.resolved_vessel_time / p.period.seconds()}};
  j["ports"] = a.ports.size();
  return j;
}

}  // namespace

void cmd_run(const config::RunConfig& config) {
  const fs::path dir = config.output_dir;
  fs::create_directories(dir);
  std::unique_ptr<outputs::Manifest> manifest_ptr;
  try {
    config.validate();
    require_input(config);
    manifest_ptr = std::make_unique<outputs::Manifest>(config::to_json(config), input_files(config));
  } catch (const Error& e) {
    throw StageError("config", e.what());
  }
  auto& manifest = *manifest_ptr;
  StageRunner stage(manifest, dir);

  ingest::ReadResult read;
  std::shared_ptr<const geo::LandMask> mask;
  journey::TonnageLookup tonnage;
  stage("ingest", [&] {
    read = ingest::read_records(config.input);
    mask = load_mask(config);
    if (config.tonnage) tonnage = read_tonnage(*config.tonnage);
  });

  Analysis a;
  stage("cleanse", [&] {
    a.prepared = cleanse_input(config, read.records, mask);
    a.prepared.read_stats = read.stats;
    a.prepared.tonnage = std::move(tonnage);
    stage.write("cleanse_report.json", outputs::cleanse_report_json(a.prepared.cleansed.report).dump(2) + "\n");
    std::ostringstream rejected;
    ingest::write_records(rejected, a.prepared.cleansed.report.rejected);
    stage.write("rejected.jsonl", rejected.str());
  });
  read = {};

  stage("trajectory", [&] {
    model_trajectories(config, a.prepared);
    if (config.dump_trajectories) {
      std::vector<ordered_json> lines;
      for (const auto& v : a.prepared.trajectories) {
        for (const auto& t : v) lines.push_back(outputs::trajectory_json(t));
      }
      stage.write("trajectories.jsonl", dump_lines(lines));
    }
  });

  stage("journey", [&] {
    a.cases = run_cases(config, a.prepared);
    if (config.dump_trajectories) {
      std::vector<ordered_json> lines;
      for (const auto& j : a.cases.at(journey::Case::Df).journeys) lines.push_back(outputs::journey_json(j));
      stage.write("journeys.jsonl", dump_lines(lines));
    }
  });

  stage("metrics", [&] {
    compute_metrics(config, a);
    const auto& df = a.cases.at(journey::Case::Df);
    stage.write("counts.csv", outputs::counts_csv(df.timeline));
    stage.write("daily_cycle.csv", outputs::daily_cycle_csv(metrics::daily_cycle(df.timeline)));
    const auto grid = config.grid();
    const std::pair<const char*, Eigen::ArrayXXd> layers[] = {
        {"density_all.asc", a.density},
        {"density_stationary.asc", metrics::stationary_density(*a.activity, a.prepared.period)},
        {"crossings_per_day.asc", metrics::crossings_per_day(*a.activity, a.prepared.period)},
        {"mean_speed.asc", metrics::mean_speed(*a.activity)},
        {"mean_bearing.asc", metrics::mean_bearing(*a.activity)},
    };
    for (const auto& [name, layer] : layers) {
      write_ascii_grid(dir / name, metrics::to_ascii_grid(layer, grid));
      manifest.output(name);
    }
  });

  stage("ports", [&] {
    compute_ports(config, a);
    stage.write("ports.geojson", outputs::ports_geojson(a.ports, config.grid()).dump(2) + "\n");
    stage.write("ports.csv", outputs::ports_csv(a.ports));
  });

  stage("uncertainty", [&] {
    compute_uncertainty(config, a);
    stage.write("uncertainty.csv", outputs::uncertainty_csv(a.uncertainty));
  });

  stage("summary", [&] { stage.write("summary.json", summary_json(a).dump(2) + "\n"); });
  manifest.write(dir);
}

trajectory::AccuracyReport cmd_validate(const config::RunConfig& config) {
  const fs::path dir = config.output_dir;
  Prepared p;
  trajectory::AccuracyReport report;
  try {
    config.validate();
    require_input(config);
  } catch (const Error& e) {
    throw StageError("config", e.what());
  }
  std::vector<AisRecord> records;
  std::shared_ptr<const geo::LandMask> mask;
  try {
    records = ingest::read_records(config.input).records;
    mask = load_mask(config);
  } catch (const Error& e) {
    throw StageError("ingest", e.what());
  }
  try {
    p = prepare(config, records, mask);
  } catch (const Error& e) {
    throw StageError("cleanse", e.what());
  }
  try {
    std::vector<Movement> movements;
    std::vector<Trajectory> trajectories;
    for (std::size_t i = 0; i < p.cleansed.vessels.size(); ++i) {
      const auto& v = p.cleansed.vessels[i];
      movements.insert(movements.end(), v.movements.begin(), v.movements.end());
      trajectories.insert(trajectories.end(), p.trajectories[i].begin(), p.trajectories[i].end());
    }
    report = trajectory::validate_model(movements, trajectories);
    fs::create_directories(dir);
    outputs::write_text(dir / "model_accuracy.csv", outputs::model_accuracy_csv(report));
  } catch (const Error& e) {
    throw StageError("validate", e.what());
  }
  return report;
}

uncertainty::RejectedReport cmd_rerun_rejected(const config::RunConfig& config) {
  const fs::path dir = config.output_dir;
  const fs::path sink = dir / "rejected.jsonl";
  const fs::path summary = dir / "summary.json";
  if (!fs::exists(sink) || !fs::exists(summary)) {
    throw StageError("rerun-rejected", "no rejected-record sink in " + dir.string() + "; run the pipeline first");
  }
  try {
    std::ifstream in(summary);
    const auto s = nlohmann::json::parse(in);
    config::RunConfig cfg = config;
    cfg.start = s.at("period").at("start_epoch").get<Timestamp>();
    cfg.end = s.at("period").at("end_epoch").get<Timestamp>();
    const double main_days = s.at("journeys").at("travel_time_days").get<double>();

    const auto rejected = ingest::read_records(sink).records;
    const auto p = prepare(cfg, rejected, load_mask(cfg));
    const auto df = run_case(cfg, p, journey::Case::Df);
    auto report = uncertainty::compare_travel_time(df.journeys, {}, rejected.size());
    report.main_travel_time_days = main_days;
    report.ratio = main_days > 0.0 ? report.travel_time_days / main_days : 0.0;
    outputs::write_text(dir / "rejected_report.json", outputs::rejected_report_json(report).dump(2) + "\n");
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw StageError("rerun-rejected", std::string("unreadable run summary: ") + e.what());
  } catch (const Error& e) {
    throw StageError("rerun-rejected", e.what());
  }
}

}  // namespace seatrace::pipeline
