#include "seatrace/journey.hpp"

#include <cmath>
#include <limits>

#include "seatrace/errors.hpp"
#include "seatrace/geo.hpp"
#include "seatrace/parallel.hpp"

namespace seatrace::journey {

std::string_view to_string(Case c) {
  switch (c) {
    case Case::Low: return "low";
    case Case::Df: return "df";
    case Case::Hi: return "hi";
  }
  return "df";
}

Case parse_case(std::string_view s) {
  if (s == "low") return Case::Low;
  if (s == "df") return Case::Df;
  if (s == "hi") return Case::Hi;
  throw ConfigError("unknown case: " + std::string(s));
}

TransitPolicy TransitPolicy::for_case(Case c) {
  TransitPolicy p;
  switch (c) {
    case Case::Low:
      p.t0_hours = 1.0;
      p.area_variant = ingest::AreaVariant::Large;
      break;
    case Case::Df:
      break;
    case Case::Hi:
      p.area_variant = ingest::AreaVariant::Small;
      break;
  }
  return p;
}

double transit_time_threshold(double v_exit_kn, double v_entry_kn, double t0_hours) {
  if (v_exit_kn < 0.0 || v_entry_kn < 0.0) throw InvalidArgument("speeds must be non-negative");
  if (!(t0_hours > 0.0)) throw InvalidArgument("t0 must be positive");
  const double v = std::max(v_exit_kn, v_entry_kn);
  if (v == 0.0) return std::numeric_limits<double>::infinity();
  return t0_hours * std::pow(v / 10.0, -4.0);
}

bool in_kiel_zone(const GeoPoint& p, const ingest::TransitArea& kiel, double buffer_m) {
  const double dlat = geo::rad2deg(buffer_m / geo::kEarthRadius);
  for (const auto& b : kiel.boxes) {
    const double dlon = dlat / std::cos(geo::deg2rad(0.5 * (b.lat_min + b.lat_max)));
    const ingest::LatLonBox grown{b.lat_min - dlat, b.lat_max + dlat, b.lon_min - dlon, b.lon_max + dlon};
    if (grown.contains(p)) return true;
  }
  return false;
}

namespace {

const ingest::TransitArea* find_area(std::span<const ingest::TransitArea> areas, std::string_view name) {
  for (const auto& a : areas) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

bool is_boundary_gate(const std::optional<std::string>& area) {
  return area && (*area == ingest::kSkagerrak || *area == ingest::kKielCanal);
}

StationaryPeriod stationary_between(Mmsi mmsi, Timestamp start, Timestamp end, const GeoPoint& a,
                                    const GeoPoint& b, double resolved_distance_m) {
  return {mmsi, start, end, geo::midpoint(a, b), geo::distance_m(a, b) <= resolved_distance_m};
}

}  // namespace

Leg classify_gap(const Trajectory& prev, const Trajectory& next, std::size_t gap_records,
                 const TransitPolicy& policy, std::span<const ingest::TransitArea> areas) {
  const GeoPoint& exit_pos = prev.route.waypoints.back();
  const GeoPoint& entry_pos = next.route.waypoints.front();
  const auto stationary = [&] {
    return Leg{stationary_between(prev.mmsi, prev.end_time, next.start_time, exit_pos, entry_pos,
                                  policy.resolved_distance_m)};
  };
  auto exit_area = ingest::in_transit_area(exit_pos, areas);
  auto entry_area = ingest::in_transit_area(entry_pos, areas);

  bool kiel_zone = false;
  if (const auto* kiel = find_area(areas, ingest::kKielCanal)) {
    kiel_zone = in_kiel_zone(exit_pos, *kiel, policy.kiel_buffer_m) ||
                in_kiel_zone(entry_pos, *kiel, policy.kiel_buffer_m);
  }
  if (!exit_area && !entry_area && !kiel_zone) return stationary();

  const auto gap = static_cast<double>(next.start_time - prev.end_time);
  const auto absent = [&] {
    AbsentPeriod a{prev.mmsi, prev.end_time, next.start_time, exit_area, entry_area};
    if (kiel_zone && !a.exit_area && !a.entry_area) a.exit_area = a.entry_area = std::string(ingest::kKielCanal);
    return Leg{a};
  };

  // Long idling at the canal locks means the vessel went through.
  if (kiel_zone && gap > policy.kiel_idle_threshold_s) return absent();
  if (gap_records > policy.max_gap_records) return stationary();
  if (is_boundary_gate(exit_area) || is_boundary_gate(entry_area)) return absent();
  if (!exit_area && !entry_area) return stationary();

  const double v_exit = prev.speed_points.empty() ? 0.0 : prev.speed_points.back().speed / geo::kKnot;
  const double v_entry = next.speed_points.empty() ? 0.0 : next.speed_points.front().speed / geo::kKnot;
  const double threshold_s = transit_time_threshold(v_exit, v_entry, policy.t0_hours) * 3600.0;
  return gap > threshold_s ? absent() : stationary();
}

Journey build_journey(const cleanse::VesselData& vessel, std::span<const Trajectory> trajectories,
                      const TransitPolicy& policy, std::span<const ingest::TransitArea> areas,
                      std::optional<double> gross_tonnage) {
  Journey j;
  j.mmsi = vessel.mmsi;
  j.category = categorize(vessel.vessel_type);
  j.gross_tonnage = gross_tonnage;
  if (trajectories.empty()) return j;

  for (std::size_t k = 1; k < trajectories.size(); ++k) {
    if (trajectories[k].start_time < trajectories[k - 1].end_time) {
      throw ConsistencyError("overlapping trajectories for vessel " + std::to_string(vessel.mmsi));
    }
  }

  const auto& st = vessel.stationary;
  auto after = [&](Timestamp t) {
    return std::upper_bound(st.begin(), st.end(), t, [](Timestamp v, const AisRecord& r) { return v < r.time; });
  };
  auto before = [&](Timestamp t) {
    return std::lower_bound(st.begin(), st.end(), t, [](const AisRecord& r, Timestamp v) { return r.time < v; });
  };

  const auto& first = trajectories.front();
  if (!st.empty() && st.front().time < first.start_time) {
    j.legs.emplace_back(stationary_between(vessel.mmsi, st.front().time, first.start_time, st.front().pos,
                                           first.route.waypoints.front(), policy.resolved_distance_m));
  } else {
    j.initial_entry_area = ingest::in_transit_area(first.route.waypoints.front(), areas);
  }

  for (std::size_t k = 0; k < trajectories.size(); ++k) {
    if (k > 0) {
      const auto& prev = trajectories[k - 1];
      const auto& next = trajectories[k];
      const auto lo = after(prev.end_time);
      const auto hi = before(next.start_time);
      const auto n = hi > lo ? static_cast<std::size_t>(hi - lo) : 0;
      if (next.start_time > prev.end_time) j.legs.push_back(classify_gap(prev, next, n, policy, areas));
    }
    j.legs.emplace_back(trajectories[k]);
  }

  const auto& last = trajectories.back();
  if (!st.empty() && st.back().time > last.end_time) {
    j.legs.emplace_back(stationary_between(vessel.mmsi, last.end_time, st.back().time,
                                           last.route.waypoints.back(), st.back().pos,
                                           policy.resolved_distance_m));
  } else {
    j.final_exit_area = ingest::in_transit_area(last.route.waypoints.back(), areas);
  }
  return j;
}

Journey apply_edge_rule(Journey journey, Timestamp analysis_start, Timestamp analysis_end) {
  std::vector<Leg> kept;
  for (auto& leg : journey.legs) {
    if (leg_end(leg) < analysis_start || leg_start(leg) > analysis_end) continue;
    std::visit(
        [&](auto& l) {
          using T = std::decay_t<decltype(l)>;
          if constexpr (!std::is_same_v<T, Trajectory>) {
            l.start_time = std::max(l.start_time, analysis_start);
            l.end_time = std::min(l.end_time, analysis_end);
          }
        },
        leg);
    kept.push_back(std::move(leg));
  }
  journey.legs = std::move(kept);
  return journey;
}

std::vector<Journey> build_journeys(std::span<const cleanse::VesselData> vessels,
                                    std::span<const std::vector<Trajectory>> trajectories,
                                    const TransitPolicy& policy, const TonnageLookup& tonnage,
                                    unsigned threads) {
  if (vessels.size() != trajectories.size()) {
    throw InvalidArgument("build_journeys needs one trajectory list per vessel");
  }
  const auto areas = ingest::baltic_transit_areas(policy.area_variant);
  std::vector<Journey> out(vessels.size());
  parallel_for(vessels.size(), threads, [&](std::size_t i) {
    std::optional<double> gt;
    if (auto it = tonnage.find(vessels[i].mmsi); it != tonnage.end()) gt = it->second;
    out[i] = build_journey(vessels[i], trajectories[i], policy, areas, gt);
  });
  return out;
}

double travel_time(std::span<const Journey> journeys) {
  double total = 0.0;
  for (const auto& j : journeys) {
    for (const auto& leg : j.legs) {
      if (const auto* t = std::get_if<Trajectory>(&leg)) total += t->duration();
    }
  }
  return total;
}

}  // namespace seatrace::journey
