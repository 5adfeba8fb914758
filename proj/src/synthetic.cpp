#include "seatrace/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "seatrace/errors.hpp"
#include "seatrace/geo.hpp"
#include "seatrace/ingest.hpp"
#include "seatrace/outputs.hpp"

namespace seatrace::synthetic {

namespace {

constexpr double kLatMin = 55.5, kLatMax = 58.3, kLonMin = 14.5, kLonMax = 19.5;
constexpr int kTypeCodes[] = {60, 35, 70, 52, 80, 30};

bool in_box(const GeoPoint& p) {
  return p.lat >= kLatMin && p.lat <= kLatMax && p.lon >= kLonMin && p.lon <= kLonMax;
}

class VesselTrack {
 public:
  VesselTrack(Mmsi mmsi, const SyntheticParams& params, Timestamp end, std::mt19937_64& rng)
      : mmsi_(mmsi), params_(params), end_(end), rng_(rng) {}

  Timestamp now() const { return t_; }
  const GeoPoint& pos() const { return pos_; }

  void begin(Timestamp t, GeoPoint p) {
    t_ = t;
    pos_ = p;
    emit(t, p, 0.0);
    move_start_ = t;
  }

  /// Sails to q at roughly `speed_kn`; false when it would overrun the period.
  bool sail(const GeoPoint& q, double speed_kn) {
    const double d = geo::distance_m(pos_, q);
    const auto dt = params_.report_interval;
    const auto n = std::max<Timestamp>(1, std::llround(d / (speed_kn * geo::kKnot * static_cast<double>(dt))));
    if (t_ + n * dt >= end_) return false;
    const double v_kn = d / static_cast<double>(n * dt) / geo::kKnot;
    const GeoPoint from = pos_;
    for (Timestamp k = 1; k <= n; ++k) {
      const GeoPoint p = k == n ? q : geo::interpolate(from, q, static_cast<double>(k) / static_cast<double>(n));
      emit(t_ + k * dt, p, v_kn);
    }
    t_ += n * dt;
    pos_ = q;
    return true;
  }

  /// Moors for about `hours`, truncated at the period end.
  bool moor(double hours) {
    const auto dt = params_.static_interval;
    auto m = std::llround(hours * 3600.0 / static_cast<double>(dt));
    m = std::min<Timestamp>(m, (end_ - 1 - t_) / dt);
    if (m < 1) return false;
    close_moving();
    for (Timestamp k = 1; k <= m; ++k) emit(t_ + k * dt, pos_, 0.0);
    truth_.push_back({mmsi_, TruthState::Stationary, t_, t_ + m * dt, {}});
    t_ += m * dt;
    move_start_ = t_;
    return true;
  }

  /// Goes silent for `hours` and reappears at q.
  void vanish(double hours, const GeoPoint& q, const std::string& area) {
    close_moving();
    const Timestamp back = t_ + std::llround(hours * 3600.0);
    truth_.push_back({mmsi_, TruthState::Absent, t_, back, area});
    t_ = back;
    pos_ = q;
    emit(back, q, 11.0);
    move_start_ = back;
  }

  void finish() { close_moving(); }

  std::vector<AisRecord>& records() { return records_; }
  std::vector<TruthInterval>& truth() { return truth_; }

 private:
  void close_moving() {
    if (t_ > move_start_) truth_.push_back({mmsi_, TruthState::Moving, move_start_, t_, {}});
  }

  void emit(Timestamp t, GeoPoint p, double sog) {
    if (params_.jitter_m > 0.0) {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      const double r = params_.jitter_m * std::sqrt(u(rng_));
      p = geo::destination(p, 360.0 * u(rng_), r);
    }
    AisRecord rec;
    rec.mmsi = mmsi_;
    rec.time = t;
    rec.pos = p;
    rec.sog = sog;
    records_.push_back(rec);
  }

  Mmsi mmsi_;
  const SyntheticParams& params_;
  Timestamp end_;
  std::mt19937_64& rng_;
  Timestamp t_ = 0;
  Timestamp move_start_ = 0;
  GeoPoint pos_;
  std::vector<AisRecord> records_;
  std::vector<TruthInterval> truth_;
};

GeoPoint next_waypoint(const GeoPoint& from, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> bearing(0.0, 360.0), dist(30e3, 100e3);
  for (int attempt = 0; attempt < 64; ++attempt) {
    const auto q = geo::destination(from, bearing(rng), dist(rng));
    if (in_box(q)) return q;
  }
  return {0.5 * (kLatMin + kLatMax), 0.5 * (kLonMin + kLonMax)};
}

/// Static reports every `static_interval`, positioned on the track between
/// the enclosing position reports and skipped near a position report.
void add_static_reports(std::vector<AisRecord>& recs, const SyntheticParams& params, int type_code,
                        std::mt19937_64& rng) {
  if (recs.size() < 2) return;
  std::vector<AisRecord> statics;
  std::uniform_int_distribution<int> port(1, 9);
  std::string destination = "PORT" + std::to_string(port(rng));
  const Timestamp max_span = std::max(params.report_interval, params.static_interval);
  for (Timestamp t = recs.front().time + 30; t < recs.back().time; t += params.static_interval) {
    const auto hi = std::lower_bound(recs.begin(), recs.end(), t,
                                     [](const AisRecord& r, Timestamp v) { return r.time < v; });
    if (hi == recs.begin() || hi == recs.end()) continue;
    const auto lo = hi - 1;
    if (hi->time - lo->time > max_span) continue;  // absent
    if (t - lo->time < 10 || hi->time - t < 10) continue;
    const double f = static_cast<double>(t - lo->time) / static_cast<double>(hi->time - lo->time);
    AisRecord s;
    s.mmsi = lo->mmsi;
    s.time = t;
    s.kind = RecordKind::StaticReport;
    s.pos = geo::interpolate(lo->pos, hi->pos, f);
    s.vessel_type = type_code;
    if (lo->sog && *lo->sog == 0.0 && hi->sog && *hi->sog == 0.0) destination = "PORT" + std::to_string(port(rng));
    s.destination = destination;
    statics.push_back(std::move(s));
  }
  recs.insert(recs.end(), statics.begin(), statics.end());
  std::stable_sort(recs.begin(), recs.end(), [](const AisRecord& a, const AisRecord& b) { return a.time < b.time; });
}

}  // namespace

SyntheticData generate(const SyntheticParams& params) {
  if (params.vessels == 0) throw InvalidArgument("at least one synthetic vessel is needed");
  if (!(params.days >= 0.5)) throw InvalidArgument("synthetic period must be at least half a day");
  if (params.report_interval <= 0 || params.static_interval <= 0) throw InvalidArgument("report intervals must be positive");
  if (params.jitter_m < 0.0) throw InvalidArgument("jitter must be non-negative");

  SyntheticData out;
  out.start = params.start;
  out.end = params.start + static_cast<Timestamp>(std::ceil(params.days)) * 86400;
  const Timestamp end = params.start + std::llround(params.days * 86400.0);

  for (std::size_t i = 0; i < params.vessels; ++i) {
    std::seed_seq seq{params.seed, static_cast<std::uint64_t>(i)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Mmsi mmsi = 230000000u + static_cast<Mmsi>(i);
    VesselTrack v(mmsi, params, end, rng);
    const Timestamp t0 = params.start + static_cast<Timestamp>(std::floor(u(rng) * 1800.0));
    auto speed = [&] { return 10.0 + 4.0 * u(rng); };

    if (i == 0 && params.skagerrak_absence && params.days >= 1.5) {
      v.begin(t0, {57.8, 11.0});
      v.sail({57.8, 9.018}, 12.0);
      v.vanish(20.0, {57.9, 9.018}, std::string(ingest::kSkagerrak));
      v.sail({57.3, 11.0}, 12.0);
    } else {
      v.begin(t0, {kLatMin + (kLatMax - kLatMin) * u(rng), kLonMin + (kLonMax - kLonMin) * u(rng)});
    }
    for (;;) {
      if (!v.sail(next_waypoint(v.pos(), rng), speed())) break;
      if (params.moorings && u(rng) < 0.5 && !v.moor(2.0 + 4.0 * u(rng))) break;
    }
    v.finish();

    const int type_code = kTypeCodes[i % std::size(kTypeCodes)];
    add_static_reports(v.records(), params, type_code, rng);
    out.records.insert(out.records.end(), v.records().begin(), v.records().end());
    out.truth.insert(out.truth.end(), v.truth().begin(), v.truth().end());
    out.tonnage.emplace_back(mmsi, u(rng) < 0.5 ? 4000.0 : 25000.0);
  }
  std::stable_sort(out.records.begin(), out.records.end(), [](const AisRecord& a, const AisRecord& b) {
    return std::tie(a.time, a.mmsi) < std::tie(b.time, b.mmsi);
  });
  return out;
}

config::RunConfig scene_config(const SyntheticParams& params, const std::filesystem::path& input,
                               const std::filesystem::path& tonnage) {
  config::RunConfig c;
  c.input = input;
  c.tonnage = tonnage;
  c.lat_min = 55.0;
  c.lat_max = 59.0;
  c.lon_min = 9.0;
  c.lon_max = 20.0;
  c.grid_dlat_arcsec = 60.0;
  c.grid_dlon_arcsec = 120.0;
  c.stationary_window_days = std::ceil(params.days);
  return c;
}

void write_scene(const SyntheticData& data, const SyntheticParams& params, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto records = dir / "records.jsonl";
  const auto tonnage = dir / "tonnage.csv";
  ingest::write_records(records, data.records);

  std::string csv = "mmsi,gross_tonnage\n";
  for (const auto& [mmsi, gt] : data.tonnage) csv += std::to_string(mmsi) + "," + outputs::format_number(gt) + "\n";
  outputs::write_text(tonnage, csv);

  nlohmann::ordered_json truth = nlohmann::ordered_json::array();
  for (const auto& t : data.truth) {
    const char* state = t.state == TruthState::Moving ? "moving" : t.state == TruthState::Stationary ? "stationary" : "absent";
    nlohmann::ordered_json j{{"mmsi", t.mmsi}, {"state", state}, {"start", t.start}, {"end", t.end}};
    if (t.area) j["area"] = *t.area;
    truth.push_back(std::move(j));
  }
  outputs::write_text(dir / "truth.json", truth.dump(1) + "\n");

  const auto cfg = scene_config(params, std::filesystem::absolute(records), std::filesystem::absolute(tonnage));
  outputs::write_text(dir / "config.json", config::to_json(cfg).dump(2) + "\n");
}

}  // namespace seatrace::synthetic
