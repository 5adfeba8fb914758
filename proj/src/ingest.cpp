#include "seatrace/ingest.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "seatrace/errors.hpp"

namespace seatrace::ingest {

std::string_view to_string(AreaVariant v) {
  switch (v) {
    case AreaVariant::Small: return "small";
    case AreaVariant::Default: return "default";
    case AreaVariant::Large: return "large";
  }
  return "default";
}

AreaVariant parse_area_variant(std::string_view s) {
  if (s == "small") return AreaVariant::Small;
  if (s == "default") return AreaVariant::Default;
  if (s == "large") return AreaVariant::Large;
  throw ConfigError("unknown transit-area variant: " + std::string(s));
}

bool TransitArea::contains(const GeoPoint& p) const {
  for (const auto& b : boxes) {
    if (b.contains(p)) return true;
  }
  return false;
}

std::vector<TransitArea> baltic_transit_areas(AreaVariant variant) {
  const double skagerrak_lon_max[] = {9.02, 9.05, 9.10};
  const double kiel_lon_max[] = {10.145, 10.150, 10.160};
  const auto v = static_cast<int>(variant);
  return {
      {std::string(kSkagerrak), {{57.050, 58.667, 9.0, skagerrak_lon_max[v]}}, variant},
      {std::string(kKielCanal), {{54.3636, 54.371, 10.140, kiel_lon_max[v]}}, variant},
      {"Limfjord", {{56.535, 57.050, 9.0, 9.05}}},
      {"Oder River", {{53.343, 53.385, 14.493, 14.621}}},
      {"Telemark", {{59.097, 59.130, 9.480, 9.747}}},
      {"Vänern Lake", {{57.766, 57.806, 11.805, 11.905}, {57.677, 57.719, 11.902, 12.002}}},
      {"Vättern Lake", {{58.384, 58.476, 16.620, 16.680}}},
      {"Södertälje", {{59.163, 59.200, 17.631, 17.708}}},
      {"Stockholm", {{59.2918, 59.459, 18.025, 18.084}}},
      {"Saimaa Canal", {{60.700, 60.730, 28.619, 28.830}}},
      {"Neva River", {{59.857, 60.008, 30.259, 30.312}}},
  };
}

std::optional<std::size_t> transit_area_index(const GeoPoint& p, std::span<const TransitArea> areas) {
  for (std::size_t i = 0; i < areas.size(); ++i) {
    if (areas[i].contains(p)) return i;
  }
  return std::nullopt;
}

std::optional<std::string> in_transit_area(const GeoPoint& p, std::span<const TransitArea> areas) {
  if (auto i = transit_area_index(p, areas)) return areas[*i].name;
  return std::nullopt;
}

geo::GridSpec RoiSpec::grid() const {
  geo::GridSpec g;
  g.lat_min = lat_min;
  g.lat_max = lat_max;
  g.lon_min = lon_min;
  g.lon_max = lon_max;
  return g;
}

TimeZoneBucket timezone_bucket(const GeoPoint& p, const RoiSpec& roi) {
  return p.lon < roi.timezone_split_lon ? TimeZoneBucket::UtcPlus1 : TimeZoneBucket::UtcPlus2;
}

std::optional<AisRecord> parse_record(std::string_view line) {
  const auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  try {
    AisRecord r;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "pos") {
      r.kind = RecordKind::PositionReport;
    } else if (kind == "static") {
      r.kind = RecordKind::StaticReport;
    } else {
      return std::nullopt;
    }
    const auto& mmsi = j.at("mmsi");
    const auto& t = j.at("t");
    if (!mmsi.is_number_integer() || !t.is_number_integer()) return std::nullopt;
    const auto mmsi_value = mmsi.get<std::int64_t>();
    if (mmsi_value < 0 || mmsi_value > 999'999'999) return std::nullopt;
    r.mmsi = static_cast<Mmsi>(mmsi_value);
    r.time = t.get<Timestamp>();
    if (r.time < 0) return std::nullopt;
    const double lat = j.at("lat").get<double>();
    const double lon = j.at("lon").get<double>();
    if (!std::isfinite(lat) || !std::isfinite(lon) || lon < -180.0 || lon > 180.0) {
      return std::nullopt;
    }
    r.pos = GeoPoint::checked(lat, lon);
    if (auto it = j.find("sog"); it != j.end() && !it->is_null()) {
      const double sog = it->get<double>();
      if (!(sog >= 0.0)) return std::nullopt;
      r.sog = sog;
    }
    if (auto it = j.find("type"); it != j.end() && !it->is_null()) {
      if (!it->is_number_integer()) return std::nullopt;
      const int type = it->get<int>();
      if (type < 0 || type > 99) return std::nullopt;
      r.vessel_type = type;
    }
    if (auto it = j.find("dest"); it != j.end() && !it->is_null()) {
      r.destination = it->get<std::string>();
    }
    return r;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::string format_record(const AisRecord& r) {
  nlohmann::ordered_json j;
  j["kind"] = r.kind == RecordKind::PositionReport ? "pos" : "static";
  j["mmsi"] = r.mmsi;
  j["t"] = r.time;
  j["lat"] = r.pos.lat;
  j["lon"] = r.pos.lon;
  if (r.sog) j["sog"] = *r.sog;
  if (r.vessel_type) j["type"] = *r.vessel_type;
  if (r.destination) j["dest"] = *r.destination;
  return j.dump();
}

ReadResult read_records(std::istream& in) {
  ReadResult result;
  std::string line;
  std::optional<Timestamp> latest;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++result.stats.lines;
    auto rec = parse_record(line);
    if (!rec) {
      ++result.stats.skipped;
      continue;
    }
    if (latest && rec->time > *latest) {
      const Timestamp gap = rec->time - *latest;
      result.stats.max_gap = std::max(result.stats.max_gap, gap);
      if (gap > 400) ++result.stats.gaps_over_400s;
    }
    if (!latest || rec->time > *latest) latest = rec->time;
    result.records.push_back(std::move(*rec));
  }
  if (in.bad()) throw IoError("read failure on record stream");
  result.stats.records = result.records.size();
  if (result.stats.skipped * 2 > result.stats.lines) {
    throw FormatError("more than half of the input lines are malformed (" +
                      std::to_string(result.stats.skipped) + " of " +
                      std::to_string(result.stats.lines) + ")");
  }
  return result;
}

ReadResult read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open record file " + path.string());
  return read_records(in);
}

void write_records(std::ostream& out, std::span<const AisRecord> records) {
  for (const auto& r : records) out << format_record(r) << '\n';
}

void write_records(const std::filesystem::path& path, std::span<const AisRecord> records) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write record file " + path.string());
  write_records(out, records);
}

RoiFilterResult filter_roi(std::span<const AisRecord> records, const RoiSpec& roi) {
  RoiFilterResult out;
  out.records.reserve(records.size());
  for (const auto& r : records) {
    if (!roi.contains(r.pos)) {
      ++out.outside_roi;
      continue;
    }
    if (roi.land_mask) {
      try {
        if (roi.land_mask->is_land(r.pos)) {
          ++out.on_land;
          continue;
        }
      } catch (const CoverageError&) {
        ++out.no_mask_coverage;
      }
    }
    out.records.push_back(r);
    out.buckets.push_back(timezone_bucket(r.pos, roi));
  }
  return out;
}

std::vector<AisRecord> filter_time_window(std::span<const AisRecord> records, Timestamp start,
                                          Timestamp end) {
  std::vector<AisRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (r.time >= start && r.time < end) out.push_back(r);
  }
  return out;
}

}  // namespace seatrace::ingest
