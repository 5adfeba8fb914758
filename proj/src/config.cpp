#include "seatrace/config.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>

#include <fmt/format.h>

#include "seatrace/errors.hpp"

namespace seatrace::config {

ingest::RoiSpec RunConfig::roi() const {
  ingest::RoiSpec r;
  r.lat_min = lat_min;
  r.lat_max = lat_max;
  r.lon_min = lon_min;
  r.lon_max = lon_max;
  r.timezone_split_lon = timezone_split_lon;
  return r;
}

geo::GridSpec RunConfig::grid() const {
  geo::GridSpec g;
  g.lat_min = lat_min;
  g.lat_max = lat_max;
  g.lon_min = lon_min;
  g.lon_max = lon_max;
  g.dlat = grid_dlat_arcsec / 3600.0;
  g.dlon = grid_dlon_arcsec / 3600.0;
  return g;
}

journey::TransitPolicy RunConfig::policy_for(journey::Case c) const {
  journey::TransitPolicy p = policy;
  p.area_variant = journey::TransitPolicy::for_case(c).area_variant;
  if (c == journey::Case::Low) p.t0_hours = low_case_t0_hours;
  return p;
}

double RunConfig::window_days(double period_days) const {
  if (!stationary_window_days) return std::min(21.0, period_days);
  if (*stationary_window_days > period_days + 1e-9) {
    throw ConfigError("stationary averaging window exceeds the analysis period");
  }
  return *stationary_window_days;
}

void RunConfig::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0)) throw ConfigError(fmt::format("{} must be positive", what));
  };
  if (!(lat_min < lat_max) || !(lon_min < lon_max)) throw ConfigError("empty region of interest");
  if (start && end && !(*start < *end)) throw ConfigError("analysis start must precede end");
  positive(grid_dlat_arcsec, "grid.dlat_arcsec");
  positive(grid_dlon_arcsec, "grid.dlon_arcsec");
  positive(d_tol, "trajectory.d_tol");
  positive(bin_seconds, "metrics.bin_seconds");
  if (stationary_window_days) positive(*stationary_window_days, "metrics.stationary_window_days");
  positive(raster_step_m, "metrics.raster_step_m");
  positive(policy.t0_hours, "journey.t0_hours");
  positive(low_case_t0_hours, "journey.low_case_t0_hours");
  positive(cleanse.max_speed_kn, "cleanse.max_speed_kn");
  positive(cleanse.max_accel, "cleanse.max_accel");
  positive(cleanse.combine_gap_s, "cleanse.combine_gap_s");
  positive(ports.threshold, "ports.threshold");
  if (cases.empty()) throw ConfigError("no case selected");
  uncertainty.validate();
}

Timestamp parse_time(const nlohmann::json& value) {
  if (value.is_number_integer()) return value.get<Timestamp>();
  if (!value.is_string()) throw ConfigError("time must be an ISO-8601 string or integer seconds");
  const auto s = value.get<std::string>();
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
  char z = 0;
  const int n = std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &y, &mo, &d, &h, &mi, &se, &z);
  const bool date_only = std::sscanf(s.c_str(), "%4d-%2d-%2d", &y, &mo, &d) == 3 && s.size() == 10;
  if (!date_only && !(n == 7 && z == 'Z') && n != 6) throw ConfigError("bad UTC time: " + s);
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || se > 60) throw ConfigError("bad UTC time: " + s);
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<Timestamp>(days) * 86400 + (date_only ? 0 : h * 3600 + mi * 60 + se);
}

std::string format_time(Timestamp t) {
  using namespace std::chrono;
  const auto day_count = static_cast<int>(t >= 0 ? t / 86400 : (t - 86399) / 86400);
  const Timestamp sec = t - static_cast<Timestamp>(day_count) * 86400;
  const year_month_day ymd{sys_days{days{day_count}}};
  return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), sec / 3600,
                     (sec / 60) % 60, sec % 60);
}

namespace {

struct NumberKey {
  const char* key;
  double RunConfig::*top = nullptr;
  std::function<double&(RunConfig&)> ref;
};

std::vector<NumberKey> number_keys() {
  auto top = [](const char* k, double RunConfig::*m) { return NumberKey{k, m, {}}; };
  auto nested = [](const char* k, std::function<double&(RunConfig&)> f) { return NumberKey{k, nullptr, std::move(f)}; };
  return {
      top("roi.lat_min", &RunConfig::lat_min),
      top("roi.lat_max", &RunConfig::lat_max),
      top("roi.lon_min", &RunConfig::lon_min),
      top("roi.lon_max", &RunConfig::lon_max),
      top("roi.timezone_split_lon", &RunConfig::timezone_split_lon),
      top("roi.land_threshold_m", &RunConfig::land_threshold_m),
      top("grid.dlat_arcsec", &RunConfig::grid_dlat_arcsec),
      top("grid.dlon_arcsec", &RunConfig::grid_dlon_arcsec),
      nested("cleanse.static_square_m", [](RunConfig& c) -> double& { return c.cleanse.static_square_m; }),
      nested("cleanse.duplicate_max_dt_s", [](RunConfig& c) -> double& { return c.cleanse.duplicate_max_dt_s; }),
      nested("cleanse.duplicate_max_speed_kmh",
             [](RunConfig& c) -> double& { return c.cleanse.duplicate_max_speed_kmh; }),
      nested("cleanse.duplicate_max_distance_m",
             [](RunConfig& c) -> double& { return c.cleanse.duplicate_max_distance_m; }),
      nested("cleanse.stationary_speed_kn", [](RunConfig& c) -> double& { return c.cleanse.stationary_speed_kn; }),
      nested("cleanse.max_gap_s", [](RunConfig& c) -> double& { return c.cleanse.max_gap_s; }),
      nested("cleanse.max_jump_m", [](RunConfig& c) -> double& { return c.cleanse.max_jump_m; }),
      nested("cleanse.max_speed_kn", [](RunConfig& c) -> double& { return c.cleanse.max_speed_kn; }),
      nested("cleanse.max_accel", [](RunConfig& c) -> double& { return c.cleanse.max_accel; }),
      nested("cleanse.combine_gap_s", [](RunConfig& c) -> double& { return c.cleanse.combine_gap_s; }),
      top("trajectory.d_tol", &RunConfig::d_tol),
      nested("trajectory.speed_change_fraction",
             [](RunConfig& c) -> double& { return c.speed_model.change_fraction; }),
      nested("trajectory.min_speed", [](RunConfig& c) -> double& { return c.speed_model.min_speed; }),
      nested("journey.t0_hours", [](RunConfig& c) -> double& { return c.policy.t0_hours; }),
      top("journey.low_case_t0_hours", &RunConfig::low_case_t0_hours),
      nested("journey.kiel_idle_threshold_s", [](RunConfig& c) -> double& { return c.policy.kiel_idle_threshold_s; }),
      nested("journey.kiel_buffer_m", [](RunConfig& c) -> double& { return c.policy.kiel_buffer_m; }),
      nested("journey.resolved_distance_m", [](RunConfig& c) -> double& { return c.policy.resolved_distance_m; }),
      top("metrics.bin_seconds", &RunConfig::bin_seconds),
      top("metrics.raster_step_m", &RunConfig::raster_step_m),
      nested("ports.threshold", [](RunConfig& c) -> double& { return c.ports.threshold; }),
      nested("ports.sigma_cells", [](RunConfig& c) -> double& { return c.ports.sigma_cells; }),
      nested("uncertainty.delta_dark", [](RunConfig& c) -> double& { return c.uncertainty.delta_dark; }),
      nested("uncertainty.delta_dark_skagerrak",
             [](RunConfig& c) -> double& { return c.uncertainty.delta_dark_skagerrak; }),
      nested("uncertainty.delta_dark_kiel", [](RunConfig& c) -> double& { return c.uncertainty.delta_dark_kiel; }),
      nested("uncertainty.delta_aisb_all", [](RunConfig& c) -> double& { return c.uncertainty.delta_aisb_all; }),
      nested("uncertainty.delta_aisb_lt10k", [](RunConfig& c) -> double& { return c.uncertainty.delta_aisb_lt10k; }),
      nested("uncertainty.delta_aisb_ge10k", [](RunConfig& c) -> double& { return c.uncertainty.delta_aisb_ge10k; }),
  };
}

double& number_ref(RunConfig& c, const NumberKey& k) { return k.top ? c.*(k.top) : k.ref(c); }

void flatten(const nlohmann::json& j, const std::string& prefix, std::vector<std::pair<std::string, nlohmann::json>>& out) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object()) {
      flatten(*it, key, out);
    } else {
      out.emplace_back(key, *it);
    }
  }
}

std::string join_cases(const std::vector<journey::Case>& cases) {
  std::string s;
  for (const auto c : cases) {
    if (!s.empty()) s += ",";
    s += journey::to_string(c);
  }
  return s;
}

}  // namespace

std::vector<journey::Case> parse_cases(std::string_view s) {
  if (s == "all") return {journey::Case::Low, journey::Case::Df, journey::Case::Hi};
  std::vector<journey::Case> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    const auto token = s.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    out.push_back(journey::parse_case(token));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

RunConfig from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  RunConfig c;
  const auto keys = number_keys();
  std::vector<std::pair<std::string, nlohmann::json>> items;
  flatten(j, "", items);
  try {
    for (const auto& [key, value] : items) {
      if (key == "input") {
        c.input = value.get<std::string>();
      } else if (key == "land_mask") {
        if (!value.is_null()) c.land_mask = value.get<std::string>();
      } else if (key == "tonnage") {
        if (!value.is_null()) c.tonnage = value.get<std::string>();
      } else if (key == "output_dir") {
        c.output_dir = value.get<std::string>();
      } else if (key == "start") {
        if (!value.is_null()) c.start = parse_time(value);
      } else if (key == "end") {
        if (!value.is_null()) c.end = parse_time(value);
      } else if (key == "cases") {
        c.cases = parse_cases(value.get<std::string>());
      } else if (key == "threads") {
        c.threads = value.get<unsigned>();
      } else if (key == "metrics.stationary_window_days") {
        if (!value.is_null()) c.stationary_window_days = value.get<double>();
      } else if (key == "dump_trajectories") {
        c.dump_trajectories = value.get<bool>();
      } else if (key == "journey.max_gap_records") {
        c.policy.max_gap_records = value.get<std::size_t>();
      } else if (key == "ports.min_cells") {
        c.ports.min_cells = value.get<std::size_t>();
      } else if (key == "uncertainty.delta_aisb_category") {
        const auto v = value.get<std::vector<double>>();
        if (v.size() != c.uncertainty.delta_aisb_category.size()) {
          throw ConfigError("uncertainty.delta_aisb_category needs one value per category");
        }
        std::copy(v.begin(), v.end(), c.uncertainty.delta_aisb_category.begin());
      } else {
        auto it = std::find_if(keys.begin(), keys.end(), [&](const NumberKey& k) { return key == k.key; });
        if (it == keys.end()) throw ConfigError("unknown configuration key: " + key);
        number_ref(c, *it) = value.get<double>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("configuration value of the wrong type: ") + e.what());
  }
  return c;
}

RunConfig load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open configuration " + path.string());
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("configuration is not valid JSON: " + path.string());
  return from_json(j);
}

nlohmann::ordered_json to_json(const RunConfig& config) {
  nlohmann::ordered_json j;
  RunConfig c = config;
  j["input"] = config.input.string();
  j["land_mask"] = config.land_mask ? nlohmann::ordered_json(config.land_mask->string()) : nullptr;
  j["tonnage"] = config.tonnage ? nlohmann::ordered_json(config.tonnage->string()) : nullptr;
  j["output_dir"] = config.output_dir.string();
  j["start"] = config.start ? nlohmann::ordered_json(format_time(*config.start)) : nullptr;
  j["end"] = config.end ? nlohmann::ordered_json(format_time(*config.end)) : nullptr;
  j["cases"] = join_cases(config.cases);
  j["threads"] = config.threads;
  for (const auto& k : number_keys()) j[k.key] = number_ref(c, k);
  j["metrics.stationary_window_days"] =
      config.stationary_window_days ? nlohmann::ordered_json(*config.stationary_window_days) : nullptr;
  j["dump_trajectories"] = config.dump_trajectories;
  j["journey.max_gap_records"] = config.policy.max_gap_records;
  j["ports.min_cells"] = config.ports.min_cells;
  j["uncertainty.delta_aisb_category"] = config.uncertainty.delta_aisb_category;
  return j;
}

}  // namespace seatrace::config
