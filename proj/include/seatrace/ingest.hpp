#pragma once

// Record input, ROI filtering and transit-area geometry.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seatrace/geo.hpp"
#include "seatrace/model.hpp"

namespace seatrace::ingest {

enum class AreaVariant { Small, Default, Large };

std::string_view to_string(AreaVariant v);
AreaVariant parse_area_variant(std::string_view s);

struct LatLonBox {
  double lat_min = 0.0;
  double lat_max = 0.0;
  double lon_min = 0.0;
  double lon_max = 0.0;

  bool contains(const GeoPoint& p) const {
    return p.lat >= lat_min && p.lat <= lat_max && p.lon >= lon_min && p.lon <= lon_max;
  }
};

/// A named boundary gate; membership is the union of its boxes.
struct TransitArea {
  std::string name;
  std::vector<LatLonBox> boxes;
  AreaVariant variant = AreaVariant::Default;

  bool contains(const GeoPoint& p) const;
};

inline constexpr std::string_view kSkagerrak = "Skagerrak";
inline constexpr std::string_view kKielCanal = "Kiel Canal";

/// The eleven Baltic gates. Only Skagerrak and Kiel Canal differ by variant.
std::vector<TransitArea> baltic_transit_areas(AreaVariant variant = AreaVariant::Default);

/// Index of the first area containing p, in list order.
std::optional<std::size_t> transit_area_index(const GeoPoint& p, std::span<const TransitArea> areas);
std::optional<std::string> in_transit_area(const GeoPoint& p, std::span<const TransitArea> areas);

enum class TimeZoneBucket { UtcPlus1, UtcPlus2 };

struct RoiSpec {
  double lat_min = 53.0;
  double lat_max = 66.0;
  double lon_min = 9.0;
  double lon_max = 32.0;
  double timezone_split_lon = 19.5;
  std::vector<TransitArea> areas = baltic_transit_areas();
  std::shared_ptr<const geo::LandMask> land_mask;

  bool contains(const GeoPoint& p) const {
    return p.lat >= lat_min && p.lat <= lat_max && p.lon >= lon_min && p.lon <= lon_max;
  }
  geo::GridSpec grid() const;
};

TimeZoneBucket timezone_bucket(const GeoPoint& p, const RoiSpec& roi);

struct ReadStats {
  std::size_t lines = 0;  // non-blank lines seen
  std::size_t records = 0;
  std::size_t skipped = 0;
  std::size_t gaps_over_400s = 0;
  Timestamp max_gap = 0;
};

struct ReadResult {
  std::vector<AisRecord> records;
  ReadStats stats;
};

/// Parses one line of the line-JSON input format; nullopt when malformed.
std::optional<AisRecord> parse_record(std::string_view line);
/// Serializes a record in the same line-JSON format (no trailing newline).
std::string format_record(const AisRecord& record);

/// Reads line-JSON records in input order. Malformed lines are skipped and
/// counted; more than half malformed raises FormatError.
ReadResult read_records(std::istream& in);
ReadResult read_records(const std::filesystem::path& path);

void write_records(std::ostream& out, std::span<const AisRecord> records);
void write_records(const std::filesystem::path& path, std::span<const AisRecord> records);

struct RoiFilterResult {
  std::vector<AisRecord> records;
  std::vector<TimeZoneBucket> buckets;  // parallel to records
  std::size_t outside_roi = 0;
  std::size_t on_land = 0;
  std::size_t no_mask_coverage = 0;  // kept, treated as water
};

/// Drops records outside the bounding box or on land and tags each kept
/// record with its time-zone bucket.
RoiFilterResult filter_roi(std::span<const AisRecord> records, const RoiSpec& roi);

/// Keeps records with start <= time < end.
std::vector<AisRecord> filter_time_window(std::span<const AisRecord> records, Timestamp start,
                                          Timestamp end);

}  // namespace seatrace::ingest
