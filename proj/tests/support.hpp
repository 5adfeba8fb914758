#pragma once

#include <optional>
#include <vector>

#include "seatrace/geo.hpp"
#include "seatrace/model.hpp"

namespace testing {

inline seatrace::AisRecord pos(seatrace::Mmsi mmsi, seatrace::Timestamp t, double lat, double lon,
                               std::optional<double> sog = std::nullopt) {
  seatrace::AisRecord r;
  r.mmsi = mmsi;
  r.time = t;
  r.pos = {lat, lon};
  r.sog = sog;
  return r;
}

inline seatrace::AisRecord stat(seatrace::Mmsi mmsi, seatrace::Timestamp t, double lat, double lon, int type,
                                std::optional<std::string> dest = std::nullopt) {
  seatrace::AisRecord r;
  r.mmsi = mmsi;
  r.time = t;
  r.pos = {lat, lon};
  r.kind = seatrace::RecordKind::StaticReport;
  r.vessel_type = type;
  r.destination = std::move(dest);
  return r;
}

/// Straight track at constant speed from `from` along `bearing_deg`.
inline std::vector<seatrace::AisRecord> straight_track(seatrace::Mmsi mmsi, seatrace::Timestamp t0,
                                                       seatrace::GeoPoint from, double bearing_deg,
                                                       double speed_ms, int n, seatrace::Timestamp dt = 60) {
  std::vector<seatrace::AisRecord> out;
  for (int i = 0; i < n; ++i) {
    const auto p = seatrace::geo::destination(from, bearing_deg, speed_ms * static_cast<double>(i * dt));
    out.push_back(pos(mmsi, t0 + i * dt, p.lat, p.lon, speed_ms / seatrace::geo::kKnot));
  }
  return out;
}

inline seatrace::Movement movement_of(std::vector<seatrace::AisRecord> records) {
  seatrace::Movement m;
  m.mmsi = records.empty() ? 0 : records.front().mmsi;
  m.records = std::move(records);
  return m;
}

}  // namespace testing
