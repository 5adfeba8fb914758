#include "seatrace/model.hpp"

#include <cmath>
#include <map>

#include <fmt/format.h>

#include "seatrace/errors.hpp"

namespace seatrace {

GeoPoint GeoPoint::checked(double lat, double lon) {
  if (!std::isfinite(lat) || !std::isfinite(lon)) {
    throw InvalidArgument("non-finite coordinate");
  }
  if (lat < -90.0 || lat > 90.0) {
    throw InvalidArgument(fmt::format("latitude {} out of [-90, 90]", lat));
  }
  if (lon >= -180.0 && lon < 180.0) return GeoPoint{lat, lon};
  double wrapped = std::fmod(lon + 180.0, 360.0);
  if (wrapped < 0.0) wrapped += 360.0;
  return GeoPoint{lat, wrapped - 180.0};
}

std::string_view to_string(VesselCategory c) {
  switch (c) {
    case VesselCategory::PassengerHighSpeed: return "PassengerHighSpeed";
    case VesselCategory::LawEnforcementMilitary: return "LawEnforcementMilitary";
    case VesselCategory::Cargo: return "Cargo";
    case VesselCategory::PilotTugRescueDiving: return "PilotTugRescueDiving";
    case VesselCategory::Tanker: return "Tanker";
    case VesselCategory::OthersIncludingFishing: return "OthersIncludingFishing";
  }
  return "OthersIncludingFishing";
}

VesselCategory categorize(std::optional<int> vessel_type) {
  if (!vessel_type) return VesselCategory::OthersIncludingFishing;
  const int code = *vessel_type;
  if (code < 0 || code > 99) {
    throw InvalidArgument(fmt::format("invalid AIS vessel type code {}", code));
  }
  // 55 is listed under both law enforcement and pilot/tug; law enforcement wins.
  if (code == 35 || code == 55) return VesselCategory::LawEnforcementMilitary;
  if (code == 20 || (code >= 23 && code <= 29) || (code >= 40 && code <= 49) ||
      (code >= 60 && code <= 69)) {
    return VesselCategory::PassengerHighSpeed;
  }
  if (code >= 70 && code <= 79) return VesselCategory::Cargo;
  if (code == 21 || code == 22 || (code >= 31 && code <= 34) || (code >= 50 && code <= 58)) {
    return VesselCategory::PilotTugRescueDiving;
  }
  if (code >= 80 && code <= 89) return VesselCategory::Tanker;
  return VesselCategory::OthersIncludingFishing;
}

std::optional<int> dominant_vessel_type(std::span<const AisRecord> records) {
  std::map<int, std::pair<std::size_t, std::size_t>> tally;  // code -> (count, first seen)
  std::size_t order = 0;
  for (const auto& r : records) {
    if (!r.vessel_type) continue;
    auto [it, inserted] = tally.try_emplace(*r.vessel_type, 0, order++);
    ++it->second.first;
  }
  std::optional<int> best;
  std::size_t best_count = 0, best_order = 0;
  for (const auto& [code, entry] : tally) {
    if (!best || entry.first > best_count ||
        (entry.first == best_count && entry.second < best_order)) {
      best = code;
      best_count = entry.first;
      best_order = entry.second;
    }
  }
  return best;
}

std::string_view to_string(SizeClass s) {
  switch (s) {
    case SizeClass::Unknown: return "Unknown";
    case SizeClass::LT10k: return "LT10k";
    case SizeClass::GE10k: return "GE10k";
  }
  return "Unknown";
}

SizeClass size_class(std::optional<double> gross_tonnage) {
  if (!gross_tonnage) return SizeClass::Unknown;
  return *gross_tonnage >= 10000.0 ? SizeClass::GE10k : SizeClass::LT10k;
}

Timestamp leg_start(const Leg& leg) {
  return std::visit([](const auto& l) { return l.start_time; }, leg);
}

Timestamp leg_end(const Leg& leg) {
  return std::visit([](const auto& l) { return l.end_time; }, leg);
}

}  // namespace seatrace
