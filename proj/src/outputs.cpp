#include "seatrace/outputs.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "seatrace/config.hpp"
#include "seatrace/errors.hpp"

namespace seatrace::outputs {

namespace {

std::string hex_digest(const unsigned char* data, unsigned len) {
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) out += fmt::format("{:02x}", data[i]);
  return out;
}

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) throw Error("SHA-256 init failed");
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_, data, n); }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned len = 0;
    EVP_DigestFinal_ex(ctx_, md.data(), &len);
    return hex_digest(md.data(), len);
  }

 private:
  EVP_MD_CTX* ctx_;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string category_name(int group) { return std::string(to_string(metrics::group_category(group))); }
std::string size_name(int group) { return std::string(to_string(metrics::group_size(group))); }

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  Sha256 h;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

std::string sha256_string(const std::string& data) {
  Sha256 h;
  h.update(data.data(), data.size());
  return h.hex();
}

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  if (v == 0.0) return "0";
  return fmt::format("{}", v);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failure on " + path.string());
}

std::string counts_csv(const metrics::CountTimeline& tl) {
  std::string out = "bin_start_utc,category,size_class,moving,stationary,entries,exits,area\n";
  std::size_t e = 0;
  for (std::size_t b = 0; b < tl.n_bins; ++b) {
    const auto when = config::format_time(tl.bin_start(b));
    const auto row = static_cast<Eigen::Index>(b);
    for (int g = 0; g < metrics::kGroupCount; ++g) {
      const int m = tl.moving(row, g), s = tl.stationary(row, g);
      if (m == 0 && s == 0) continue;
      out += fmt::format("{},{},{},{},{},0,0,*\n", when, category_name(g), size_name(g), m, s);
    }
    std::map<std::pair<std::string, int>, std::pair<int, int>> transit;
    for (; e < tl.events.size() && tl.events[e].bin == b; ++e) {
      auto& slot = transit[{tl.events[e].area, tl.events[e].group}];
      (tl.events[e].entry ? slot.first : slot.second) += 1;
    }
    for (const auto& [key, n] : transit) {
      out += fmt::format("{},{},{},0,0,{},{},{}\n", when, category_name(key.second), size_name(key.second), n.first,
                         n.second, csv_field(key.first));
    }
  }
  return out;
}

std::string uncertainty_csv(std::span<const uncertainty::UncertaintyRow> rows) {
  std::string out = "metric,category,value,stat,syst_plus,syst_minus,case_low,case_hi\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", r.metric, csv_field(r.category), format_number(r.value.value),
                       format_number(r.value.stat), format_number(r.value.syst_plus),
                       format_number(r.value.syst_minus), format_number(r.case_low), format_number(r.case_hi));
  }
  return out;
}

std::string daily_cycle_csv(const metrics::DailyCycle& cycle) {
  std::string out = "time_of_day_utc,moving_mean,stationary_mean,entries,exits\n";
  const auto k = cycle.moving.size();
  for (std::size_t i = 0; i < k; ++i) {
    const auto minutes = static_cast<int>(std::llround(static_cast<double>(i) * 1440.0 / static_cast<double>(k)));
    out += fmt::format("{:02d}:{:02d},{},{},{},{}\n", minutes / 60, minutes % 60, format_number(cycle.moving[i]),
                       format_number(cycle.stationary[i]), format_number(cycle.entries[i]),
                       format_number(cycle.exits[i]));
  }
  return out;
}

std::string ports_csv(std::span<const ports::PortArea> ports) {
  std::string out =
      "id,lat,lon,cells,area_km2,vessels_in_port,vessels_per_km2,arrivals,arrivals_per_day,top_destination,"
      "coast_distance_m\n";
  for (const auto& p : ports) {
    const double per_km2 = p.area_km2 > 0.0 ? p.vessels_in_port / p.area_km2 : 0.0;
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", p.id, format_number(p.barycenter.lat),
                       format_number(p.barycenter.lon), p.cells.size(), format_number(p.area_km2),
                       format_number(p.vessels_in_port), format_number(per_km2), p.arrivals,
                       format_number(p.arrivals_per_day), csv_field(p.top_destination),
                       p.coast_distance_m < 0.0 ? std::string() : format_number(p.coast_distance_m));
  }
  return out;
}

std::string model_accuracy_csv(const trajectory::AccuracyReport& r) {
  std::string out = "table,name,count,median,p90,mean_reported_kmh,mean_inferred_kmh,mean_model_kmh\n";
  auto add = [&](const char* name, const trajectory::Quantiles& q) {
    out += fmt::format("accuracy,{},{},{},{},,,\n", name, q.count, format_number(q.median), format_number(q.p90));
  };
  add("position_error_m", r.position_error_m);
  add("route_distance_m", r.route_distance_m);
  add("time_error_s", r.time_error_s);
  add("relative_position", r.relative_position);
  add("relative_time", r.relative_time);
  out += fmt::format("accuracy,route_distance_over_tol_fraction,{},{},,,,\n", r.route_distance_m.count,
                     format_number(r.fraction_route_over_tol));
  for (const auto& b : r.speed_bins) {
    out += fmt::format("speed,{},{},,,{},{},{}\n", b.lower_kmh, b.count, format_number(b.mean_reported_kmh),
                       format_number(b.mean_inferred_kmh), format_number(b.mean_model_kmh));
  }
  return out;
}

nlohmann::ordered_json cleanse_report_json(const cleanse::CleanseReport& r) {
  nlohmann::ordered_json j;
  j["input_records"] = r.input_records;
  j["input_vessels"] = r.input_vessels;
  j["exact_duplicates"] = r.exact_duplicates;
  j["static_vessels"] = r.static_vessels;
  j["static_vessel_records"] = r.static_vessel_records;
  j["static_positions_corrected"] = r.static_positions_corrected;
  j["low_speed_duplicates"] = r.low_speed_duplicates;
  j["segmentation_removed_pass1"] = r.segmentation_removed_pass1;
  j["segmentation_removed_pass2"] = r.segmentation_removed_pass2;
  j["stationary_pass1"] = r.stationary_pass1;
  j["movements_pass1"] = r.movements_pass1;
  j["movements_pass2"] = r.movements_pass2;
  j["outliers_speed"] = r.outliers_speed;
  j["outliers_accel"] = r.outliers_accel;
  j["area_filtered_movements"] = r.area_filtered_movements;
  j["area_filtered_records"] = r.area_filtered_records;
  j["merges"] = r.merges;
  j["dropped_vessels"] = r.dropped_vessels;
  j["dropped_vessel_records"] = r.dropped_vessel_records;
  j["final_vessels"] = r.final_vessels;
  j["final_movements"] = r.final_movements;
  j["kept_in_movements"] = r.kept_in_movements;
  j["stationary_records"] = r.stationary_records;
  j["removed_total"] = r.removed_total();
  j["rejected_records"] = r.rejected.size();
  return j;
}

nlohmann::ordered_json rejected_report_json(const uncertainty::RejectedReport& r) {
  nlohmann::ordered_json j;
  j["rejected_records"] = r.rejected_records;
  j["journeys"] = r.journeys;
  j["trajectories"] = r.trajectories;
  j["travel_time_days"] = r.travel_time_days;
  j["main_travel_time_days"] = r.main_travel_time_days;
  j["ratio"] = r.ratio;
  return j;
}

nlohmann::ordered_json trajectory_json(const Trajectory& t) {
  nlohmann::ordered_json j;
  j["mmsi"] = t.mmsi;
  j["start"] = t.start_time;
  j["end"] = t.end_time;
  j["d_tol"] = t.route.d_tol;
  auto& wp = j["waypoints"] = nlohmann::ordered_json::array();
  for (const auto& p : t.route.waypoints) wp.push_back({p.lat, p.lon});
  auto& sp = j["speed_points"] = nlohmann::ordered_json::array();
  for (const auto& p : t.speed_points) sp.push_back({p.path_distance, p.time, p.speed});
  return j;
}

nlohmann::ordered_json journey_json(const Journey& journey) {
  nlohmann::ordered_json j;
  j["mmsi"] = journey.mmsi;
  j["category"] = to_string(journey.category);
  j["gross_tonnage"] = journey.gross_tonnage ? nlohmann::ordered_json(*journey.gross_tonnage) : nullptr;
  auto opt = [](const std::optional<std::string>& s) { return s ? nlohmann::ordered_json(*s) : nullptr; };
  j["initial_entry_area"] = opt(journey.initial_entry_area);
  j["final_exit_area"] = opt(journey.final_exit_area);
  auto& legs = j["legs"] = nlohmann::ordered_json::array();
  for (const auto& leg : journey.legs) {
    if (const auto* t = std::get_if<Trajectory>(&leg)) {
      auto l = trajectory_json(*t);
      l["kind"] = "trajectory";
      legs.push_back(std::move(l));
    } else if (const auto* s = std::get_if<StationaryPeriod>(&leg)) {
      legs.push_back({{"kind", "stationary"},
                      {"start", s->start_time},
                      {"end", s->end_time},
                      {"idle_pos", {s->idle_pos.lat, s->idle_pos.lon}},
                      {"position_resolved", s->position_resolved}});
    } else {
      const auto& a = std::get<AbsentPeriod>(leg);
      legs.push_back({{"kind", "absent"},
                      {"start", a.start_time},
                      {"end", a.end_time},
                      {"exit_area", opt(a.exit_area)},
                      {"entry_area", opt(a.entry_area)}});
    }
  }
  return j;
}

namespace {

using Vertex = std::pair<int, int>;  // (col, row) corner indices

double signed_area(const std::vector<Vertex>& ring) {
  double a = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    a += static_cast<double>(ring[i].first) * ring[i + 1].second -
         static_cast<double>(ring[i + 1].first) * ring[i].second;
  }
  return 0.5 * a;
}

bool inside(const std::vector<Vertex>& ring, double x, double y) {
  bool in = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const double xi = ring[i].first, yi = ring[i].second, xj = ring[j].first, yj = ring[j].second;
    if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi) in = !in;
  }
  return in;
}

std::vector<std::vector<Vertex>> trace_rings(const ports::PortArea& port) {
  std::set<std::pair<int, int>> cells;
  for (const auto& c : port.cells) cells.insert({c.row, c.col});
  auto member = [&](int r, int c) { return cells.count({r, c}) > 0; };
  // Directed boundary edges keep the region on their left.
  std::multimap<Vertex, Vertex> edges;
  for (const auto& [r, c] : cells) {
    if (!member(r - 1, c)) edges.emplace(Vertex{c, r}, Vertex{c + 1, r});
    if (!member(r, c + 1)) edges.emplace(Vertex{c + 1, r}, Vertex{c + 1, r + 1});
    if (!member(r + 1, c)) edges.emplace(Vertex{c + 1, r + 1}, Vertex{c, r + 1});
    if (!member(r, c - 1)) edges.emplace(Vertex{c, r + 1}, Vertex{c, r});
  }
  std::vector<std::vector<Vertex>> rings;
  while (!edges.empty()) {
    auto it = edges.begin();
    const Vertex origin = it->first;
    std::vector<Vertex> ring{origin};
    Vertex at = it->second;
    edges.erase(it);
    while (at != origin) {
      ring.push_back(at);
      auto next = edges.find(at);
      if (next == edges.end()) throw ConsistencyError("open port boundary");
      at = next->second;
      edges.erase(next);
    }
    ring.push_back(origin);
    rings.push_back(std::move(ring));
  }
  return rings;
}

}  // namespace

std::vector<std::vector<GeoPoint>> port_rings(const ports::PortArea& port, const geo::GridSpec& grid) {
  std::vector<std::vector<GeoPoint>> out;
  for (const auto& ring : trace_rings(port)) {
    std::vector<GeoPoint> pts;
    for (const auto& [c, r] : ring) pts.push_back({grid.lat_min + r * grid.dlat, grid.lon_min + c * grid.dlon});
    out.push_back(std::move(pts));
  }
  return out;
}

nlohmann::ordered_json ports_geojson(std::span<const ports::PortArea> ports, const geo::GridSpec& grid) {
  nlohmann::ordered_json fc;
  fc["type"] = "FeatureCollection";
  auto& features = fc["features"] = nlohmann::ordered_json::array();
  for (const auto& p : ports) {
    const auto rings = trace_rings(p);
    std::vector<std::vector<std::vector<Vertex>>> polygons;
    std::vector<const std::vector<Vertex>*> holes;
    for (const auto& ring : rings) {
      if (signed_area(ring) > 0.0) {
        polygons.push_back({ring});
      } else {
        holes.push_back(&ring);
      }
    }
    for (const auto* hole : holes) {
      const double x = (*hole)[0].first + 0.5 * ((*hole)[1].first - (*hole)[0].first);
      const double y = (*hole)[0].second + 0.5 * ((*hole)[1].second - (*hole)[0].second);
      for (auto& poly : polygons) {
        if (inside(poly.front(), x, y)) {
          poly.push_back(*hole);
          break;
        }
      }
    }
    nlohmann::ordered_json coords = nlohmann::ordered_json::array();
    for (const auto& poly : polygons) {
      nlohmann::ordered_json jp = nlohmann::ordered_json::array();
      for (const auto& ring : poly) {
        nlohmann::ordered_json jr = nlohmann::ordered_json::array();
        for (const auto& [c, r] : ring) jr.push_back({grid.lon_min + c * grid.dlon, grid.lat_min + r * grid.dlat});
        jp.push_back(std::move(jr));
      }
      coords.push_back(std::move(jp));
    }
    nlohmann::ordered_json f;
    f["type"] = "Feature";
    f["geometry"] = {{"type", "MultiPolygon"}, {"coordinates", std::move(coords)}};
    f["properties"] = {{"id", p.id},
                       {"barycenter", {p.barycenter.lon, p.barycenter.lat}},
                       {"area_km2", p.area_km2},
                       {"vessels_in_port", p.vessels_in_port},
                       {"arrivals_per_day", p.arrivals_per_day},
                       {"top_destination", p.top_destination}};
    features.push_back(std::move(f));
  }
  return fc;
}

Manifest::Manifest(nlohmann::ordered_json effective_config, std::vector<std::filesystem::path> inputs)
    : config_(std::move(effective_config)) {
  for (const auto& p : inputs) inputs_.emplace_back(p.string(), sha256_file(p));
}

void Manifest::stage(const std::string& name, const std::string& status, const std::string& message) {
  stages_.push_back({name, status, message});
}

void Manifest::output(const std::string& relative_path) { outputs_.push_back(relative_path); }

nlohmann::ordered_json Manifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool"] = "seatrace";
  j["version"] = kVersion;
  j["config_sha256"] = sha256_string(config_.dump());
  auto& in = j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& [path, hash] : inputs_) in.push_back({{"path", path}, {"sha256", hash}});
  auto& st = j["stages"] = nlohmann::ordered_json::array();
  for (const auto& s : stages_) st.push_back({{"name", s.name}, {"status", s.status}, {"message", s.message}});
  j["outputs"] = outputs_;
  j["config"] = config_;
  return j;
}

void Manifest::write(const std::filesystem::path& dir) const {
  write_text(dir / "manifest.json", to_json().dump(2) + "\n");
}

}  // namespace seatrace::outputs
