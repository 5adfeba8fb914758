#include "seatrace/cleanse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include "seatrace/geo.hpp"
#include "seatrace/parallel.hpp"

namespace seatrace::cleanse {

std::size_t CleanseReport::removed_total() const {
  return exact_duplicates + static_vessel_records + low_speed_duplicates +
         segmentation_removed_pass1 + segmentation_removed_pass2 + outliers_speed +
         outliers_accel + merges + dropped_vessel_records;
}

CleanseReport& CleanseReport::operator+=(const CleanseReport& o) {
  input_records += o.input_records;
  input_vessels += o.input_vessels;
  exact_duplicates += o.exact_duplicates;
  static_vessels += o.static_vessels;
  static_vessel_records += o.static_vessel_records;
  static_positions_corrected += o.static_positions_corrected;
  low_speed_duplicates += o.low_speed_duplicates;
  segmentation_removed_pass1 += o.segmentation_removed_pass1;
  segmentation_removed_pass2 += o.segmentation_removed_pass2;
  stationary_pass1 += o.stationary_pass1;
  movements_pass1 += o.movements_pass1;
  movements_pass2 += o.movements_pass2;
  outliers_speed += o.outliers_speed;
  outliers_accel += o.outliers_accel;
  area_filtered_movements += o.area_filtered_movements;
  area_filtered_records += o.area_filtered_records;
  merges += o.merges;
  dropped_vessels += o.dropped_vessels;
  dropped_vessel_records += o.dropped_vessel_records;
  final_vessels += o.final_vessels;
  final_movements += o.final_movements;
  kept_in_movements += o.kept_in_movements;
  stationary_records += o.stationary_records;
  rejected.insert(rejected.end(), o.rejected.begin(), o.rejected.end());
  return *this;
}

double pair_speed(const AisRecord& a, const AisRecord& b) {
  const double d = geo::distance_m(a.pos, b.pos);
  const auto dt = static_cast<double>(b.time - a.time);
  if (dt == 0.0) return d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return d / std::abs(dt);
}

bool fits_in_square(std::span<const AisRecord> records, double side_m) {
  std::vector<GeoPoint> points;
  points.reserve(records.size());
  for (const auto& r : records) points.push_back(r.pos);
  const Eigen::Vector2d extent = geo::bbox_extent_m(points);
  return extent.x() < side_m && extent.y() < side_m;
}

std::size_t group_by_vessel(std::span<const AisRecord> records,
                            std::vector<std::vector<AisRecord>>& vessels) {
  std::map<Mmsi, std::vector<AisRecord>> by_mmsi;
  for (const auto& r : records) by_mmsi[r.mmsi].push_back(r);
  std::size_t repeats = 0;
  vessels.clear();
  vessels.reserve(by_mmsi.size());
  for (auto& [mmsi, list] : by_mmsi) {
    std::stable_sort(list.begin(), list.end(),
                     [](const AisRecord& a, const AisRecord& b) { return a.time < b.time; });
    std::vector<AisRecord> unique;
    unique.reserve(list.size());
    std::size_t same_time_begin = 0;
    for (auto& r : list) {
      if (!unique.empty() && unique.back().time != r.time) same_time_begin = unique.size();
      bool repeat = false;
      for (std::size_t k = same_time_begin; k < unique.size(); ++k) {
        if (unique[k].pos == r.pos && unique[k].kind == r.kind) {
          repeat = true;
          break;
        }
      }
      if (repeat) {
        ++repeats;
      } else {
        unique.push_back(std::move(r));
      }
    }
    vessels.push_back(std::move(unique));
  }
  return repeats;
}

std::pair<std::size_t, std::size_t> remove_static_vessels(std::vector<std::vector<AisRecord>>& vessels,
                                                          double side_m) {
  std::size_t n_vessels = 0, n_records = 0;
  std::erase_if(vessels, [&](const std::vector<AisRecord>& v) {
    if (!fits_in_square(v, side_m)) return false;
    ++n_vessels;
    n_records += v.size();
    return true;
  });
  return {n_vessels, n_records};
}

std::size_t correct_static_positions(std::vector<AisRecord>& records) {
  // Positions of position reports only; static reports never anchor.
  std::vector<std::size_t> anchors;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].kind == RecordKind::PositionReport) anchors.push_back(i);
  }
  std::size_t corrected = 0;
  std::size_t next_anchor = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    while (next_anchor < anchors.size() && anchors[next_anchor] < i) ++next_anchor;
    if (records[i].kind != RecordKind::StaticReport) continue;
    if (next_anchor == 0 || next_anchor >= anchors.size()) continue;
    const AisRecord& before = records[anchors[next_anchor - 1]];
    const AisRecord& after = records[anchors[next_anchor]];
    const auto span = static_cast<double>(after.time - before.time);
    const double f = span > 0.0 ? static_cast<double>(records[i].time - before.time) / span : 0.0;
    records[i].pos = geo::interpolate(before.pos, after.pos, std::clamp(f, 0.0, 1.0));
    ++corrected;
  }
  return corrected;
}

std::vector<AisRecord> remove_duplicates(std::span<const AisRecord> records,
                                         const CleanseParams& params) {
  std::vector<AisRecord> kept;
  kept.reserve(records.size());
  const double max_speed = params.duplicate_max_speed_kmh / 3.6;
  for (const auto& r : records) {
    if (!kept.empty()) {
      const AisRecord& prev = kept.back();
      const auto dt = static_cast<double>(r.time - prev.time);
      if (dt < params.duplicate_max_dt_s && pair_speed(prev, r) < max_speed &&
          geo::distance_m(prev.pos, r.pos) < params.duplicate_max_distance_m) {
        continue;
      }
    }
    kept.push_back(r);
  }
  return kept;
}

namespace {

enum SplitFlag : unsigned {
  kNoSplit = 0,
  kSpeedSplit = 1,
  kTimeSplit = 2,
  kDistanceSplit = 4,
  kTransitSplit = 8,
};

constexpr unsigned kGapSplits = kTimeSplit | kDistanceSplit;

}  // namespace

Segmentation segment_movements(std::span<const AisRecord> records,
                               std::span<const ingest::TransitArea> areas,
                               const CleanseParams& params) {
  Segmentation out;
  const std::size_t n = records.size();
  if (n == 0) return out;
  if (n == 1) {
    out.removed.push_back(records[0]);
    return out;
  }

  const double stationary_speed = params.stationary_speed_kn * geo::kKnot;
  std::vector<unsigned> split(n - 1, kNoSplit);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto& a = records[i];
    const auto& b = records[i + 1];
    if (pair_speed(a, b) < stationary_speed) split[i] |= kSpeedSplit;
    if (static_cast<double>(b.time - a.time) > params.max_gap_s) split[i] |= kTimeSplit;
    if (geo::distance_m(a.pos, b.pos) > params.max_jump_m) split[i] |= kDistanceSplit;
  }

  std::vector<std::optional<std::size_t>> area(n);
  for (std::size_t i = 0; i < n; ++i) area[i] = ingest::transit_area_index(records[i].pos, areas);

  // Transit splits inside each candidate segment bounded by the other rules.
  std::size_t seg_begin = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool seg_end = (i + 1 == n) || split[i] != kNoSplit;
    if (!seg_end) continue;
    const std::size_t a = seg_begin, b = i;  // inclusive
    seg_begin = i + 1;
    if (b - a + 1 < 3) continue;
    std::size_t k = a;
    while (k <= b) {
      if (!area[k]) {
        ++k;
        continue;
      }
      std::size_t e = k;
      while (e + 1 <= b && area[e + 1] == area[k]) ++e;
      // Only a pass through the area splits; a run touching the segment
      // edge already ends or starts the movement there.
      const std::size_t first_pair = k > a ? k - 1 : a;
      const std::size_t last_pair = e;
      if (k > a && e < b) {
        std::size_t best = first_pair;
        for (std::size_t p = first_pair; p <= last_pair; ++p) {
          if (records[p + 1].time - records[p].time > records[best + 1].time - records[best].time) {
            best = p;
          }
        }
        split[best] |= kTransitSplit;
      }
      k = e + 1;
    }
  }

  auto left_split = [&](std::size_t s) -> std::optional<unsigned> {
    if (s == 0) return std::nullopt;
    return split[s - 1];
  };
  auto right_split = [&](std::size_t e) -> std::optional<unsigned> {
    if (e + 1 >= n) return std::nullopt;
    return split[e];
  };

  std::size_t piece_begin = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 < n && split[i] == kNoSplit) continue;
    const std::size_t s = piece_begin, e = i;
    piece_begin = i + 1;
    const auto left = left_split(s);
    const auto right = right_split(e);
    if (s == e) {
      const bool speed_only = (left && *left == kSpeedSplit) || (right && *right == kSpeedSplit);
      if (speed_only) {
        out.stationary.push_back(records[s]);
      } else {
        out.removed.push_back(records[s]);
      }
      continue;
    }
    bool inside_one_area = area[s].has_value();
    for (std::size_t k = s; k <= e && inside_one_area; ++k) inside_one_area = area[k] == area[s];
    const auto idle = [](std::optional<unsigned> f) {
      return f && (*f & (kSpeedSplit | kGapSplits)) != 0;
    };
    if (inside_one_area && idle(left) && idle(right)) {
      out.removed.insert(out.removed.end(), records.begin() + s, records.begin() + e + 1);
      continue;
    }
    Movement m;
    m.mmsi = records[s].mmsi;
    m.records.assign(records.begin() + s, records.begin() + e + 1);
    out.movements.push_back(std::move(m));
  }
  return out;
}

double central_acceleration(std::span<const AisRecord> r, std::size_t i) {
  const double v_in = pair_speed(r[i - 1], r[i]);
  const double v_out = pair_speed(r[i], r[i + 1]);
  const double half_span = static_cast<double>(r[i + 1].time - r[i - 1].time) / 2.0;
  if (half_span == 0.0) {
    return v_in == v_out ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return (v_out - v_in) / half_span;
}

OutlierResult remove_outliers(std::vector<Movement> movements, const CleanseParams& params) {
  OutlierResult out;
  const double max_speed = params.max_speed_kn * geo::kKnot;
  for (auto& m : movements) {
    auto& recs = m.records;
    bool changed = true;
    while (changed && !recs.empty()) {
      changed = false;

      std::vector<AisRecord> kept;
      kept.reserve(recs.size());
      kept.push_back(recs.front());
      for (std::size_t i = 1; i < recs.size(); ++i) {
        if (pair_speed(kept.back(), recs[i]) > max_speed) {
          out.rejected.push_back(recs[i]);
          ++out.by_speed;
          changed = true;
        } else {
          kept.push_back(recs[i]);
        }
      }
      recs = std::move(kept);

      if (recs.size() < 3) continue;
      std::vector<double> accel(recs.size(), 0.0);
      for (std::size_t i = 1; i + 1 < recs.size(); ++i) {
        accel[i] = std::abs(central_acceleration(recs, i));
      }
      std::vector<bool> flagged(recs.size(), false);
      for (std::size_t i = 1; i + 1 < recs.size(); ++i) flagged[i] = accel[i] > params.max_accel;
      std::vector<AisRecord> survivors;
      survivors.reserve(recs.size());
      for (std::size_t i = 0; i < recs.size(); ++i) {
        // Only local maxima go, so a spike does not take its neighbours along.
        const bool remove = flagged[i] && !(flagged[i - 1] && accel[i - 1] >= accel[i]) &&
                            !(flagged[i + 1] && accel[i + 1] > accel[i]);
        if (remove) {
          out.rejected.push_back(recs[i]);
          ++out.by_accel;
          changed = true;
        } else {
          survivors.push_back(recs[i]);
        }
      }
      recs = std::move(survivors);
    }
  }
  std::erase_if(movements, [](const Movement& m) { return m.records.empty(); });
  out.movements = std::move(movements);
  return out;
}

AreaFilterResult area_filter_movements(std::vector<Movement> movements,
                                       const CleanseParams& params) {
  AreaFilterResult out;
  for (auto& m : movements) {
    if (fits_in_square(m.records, params.static_square_m)) {
      out.stationary.insert(out.stationary.end(), m.records.begin(), m.records.end());
      ++out.reclassified_movements;
    } else {
      out.movements.push_back(std::move(m));
    }
  }
  return out;
}

CombineResult combine_movements(std::vector<Movement> movements, const CleanseParams& params,
                                const MergeBarrier& barrier) {
  CombineResult out;
  std::sort(movements.begin(), movements.end(),
            [](const Movement& a, const Movement& b) { return a.start_time() < b.start_time(); });
  for (auto& m : movements) {
    if (!out.movements.empty()) {
      Movement& current = out.movements.back();
      const auto gap = static_cast<double>(m.start_time() - current.end_time());
      if (gap <= params.combine_gap_s && !(barrier && barrier(current, m))) {
        out.dropped.push_back(m.records.front());
        current.records.insert(current.records.end(), m.records.begin() + 1, m.records.end());
        ++out.merges;
        continue;
      }
    }
    out.movements.push_back(std::move(m));
  }
  return out;
}

namespace {

void sort_by_time(std::vector<AisRecord>& records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const AisRecord& a, const AisRecord& b) { return a.time < b.time; });
}

struct VesselOutcome {
  std::optional<VesselData> data;
  CleanseReport report;
};

VesselOutcome cleanse_vessel(std::vector<AisRecord> records,
                             std::span<const ingest::TransitArea> areas,
                             const CleanseParams& params, const MergeBarrier& barrier) {
  VesselOutcome result;
  CleanseReport& rep = result.report;
  VesselData vessel;
  vessel.mmsi = records.front().mmsi;
  vessel.vessel_type = dominant_vessel_type(records);
  for (const auto& r : records) {
    if (r.kind == RecordKind::StaticReport && r.destination) {
      vessel.destinations.push_back({r.time, *r.destination});
    }
  }

  rep.static_positions_corrected = correct_static_positions(records);
  auto deduped = remove_duplicates(records, params);
  rep.low_speed_duplicates = records.size() - deduped.size();

  auto pass1 = segment_movements(deduped, areas, params);
  rep.segmentation_removed_pass1 = pass1.removed.size();
  rep.stationary_pass1 = pass1.stationary.size();
  rep.movements_pass1 = pass1.movements.size();
  vessel.stationary = std::move(pass1.stationary);

  auto outliers = remove_outliers(std::move(pass1.movements), params);
  rep.outliers_speed = outliers.by_speed;
  rep.outliers_accel = outliers.by_accel;
  rep.rejected = std::move(outliers.rejected);
  sort_by_time(rep.rejected);

  std::vector<Movement> pass2_movements;
  for (const auto& m : outliers.movements) {
    auto pass2 = segment_movements(m.records, areas, params);
    rep.segmentation_removed_pass2 += pass2.removed.size();
    vessel.stationary.insert(vessel.stationary.end(), pass2.stationary.begin(),
                             pass2.stationary.end());
    for (auto& pm : pass2.movements) pass2_movements.push_back(std::move(pm));
  }
  rep.movements_pass2 = pass2_movements.size();

  auto filtered = area_filter_movements(std::move(pass2_movements), params);
  rep.area_filtered_movements = filtered.reclassified_movements;
  rep.area_filtered_records = filtered.stationary.size();
  vessel.stationary.insert(vessel.stationary.end(), filtered.stationary.begin(),
                           filtered.stationary.end());

  auto combined = combine_movements(std::move(filtered.movements), params, barrier);
  rep.merges = combined.merges;
  sort_by_time(vessel.stationary);

  if (combined.movements.empty()) {
    rep.dropped_vessels = 1;
    rep.dropped_vessel_records = vessel.stationary.size();
    return result;
  }
  vessel.movements = std::move(combined.movements);
  rep.final_vessels = 1;
  rep.final_movements = vessel.movements.size();
  for (const auto& m : vessel.movements) rep.kept_in_movements += m.records.size();
  rep.stationary_records = vessel.stationary.size();
  result.data = std::move(vessel);
  return result;
}

}  // namespace

CleanseOutput run_cleanse(std::span<const AisRecord> records,
                          std::span<const ingest::TransitArea> areas,
                          const CleanseParams& params, const MergeBarrier& barrier,
                          unsigned threads) {
  CleanseOutput out;
  out.report.input_records = records.size();
  std::vector<std::vector<AisRecord>> vessels;
  out.report.exact_duplicates = group_by_vessel(records, vessels);
  out.report.input_vessels = vessels.size();
  const auto [static_vessels, static_records] = remove_static_vessels(vessels, params.static_square_m);
  out.report.static_vessels = static_vessels;
  out.report.static_vessel_records = static_records;

  std::vector<VesselOutcome> outcomes(vessels.size());
  parallel_for(vessels.size(), threads, [&](std::size_t i) {
    outcomes[i] = cleanse_vessel(std::move(vessels[i]), areas, params, barrier);
  });
  for (auto& o : outcomes) {
    out.report += o.report;
    if (o.data) out.vessels.push_back(std::move(*o.data));
  }
  return out;
}

}  // namespace seatrace::cleanse
