#include "seatrace/ports.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <tuple>

#include "seatrace/errors.hpp"
#include "seatrace/ingest.hpp"

namespace seatrace::ports {

using BoolArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

namespace {

constexpr int kNeighbours[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}};

Eigen::ArrayXd gaussian_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
  Eigen::ArrayXd k(2 * radius + 1);
  for (int i = -radius; i <= radius; ++i) k(i + radius) = std::exp(-0.5 * i * i / (sigma * sigma));
  return k / k.sum();
}

}  // namespace

Eigen::ArrayXXd gaussian_smooth(const Eigen::ArrayXXd& values, double sigma_cells) {
  if (!(sigma_cells > 0.0)) return values;
  const Eigen::ArrayXd k = gaussian_kernel(sigma_cells);
  const auto radius = static_cast<Eigen::Index>(k.size() / 2);
  const Eigen::Index rows = values.rows(), cols = values.cols();
  Eigen::ArrayXXd tmp = Eigen::ArrayXXd::Zero(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (Eigen::Index i = -radius; i <= radius; ++i) {
        acc += k(i + radius) * values(r, std::clamp<Eigen::Index>(c + i, 0, cols - 1));
      }
      tmp(r, c) = acc;
    }
  }
  Eigen::ArrayXXd out = Eigen::ArrayXXd::Zero(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (Eigen::Index i = -radius; i <= radius; ++i) {
        acc += k(i + radius) * tmp(std::clamp<Eigen::Index>(r + i, 0, rows - 1), c);
      }
      out(r, c) = acc;
    }
  }
  return out;
}

Eigen::ArrayXXi label_components(const BoolArray& mask, int& count) {
  const Eigen::Index rows = mask.rows(), cols = mask.cols();
  Eigen::ArrayXXi labels = Eigen::ArrayXXi::Zero(rows, cols);
  count = 0;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> stack;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!mask(r, c) || labels(r, c) != 0) continue;
      labels(r, c) = ++count;
      stack.assign(1, {r, c});
      while (!stack.empty()) {
        const auto [pr, pc] = stack.back();
        stack.pop_back();
        for (const auto& d : kNeighbours) {
          const Eigen::Index nr = pr + d[0], nc = pc + d[1];
          if (nr < 0 || nc < 0 || nr >= rows || nc >= cols) continue;
          if (!mask(nr, nc) || labels(nr, nc) != 0) continue;
          labels(nr, nc) = count;
          stack.emplace_back(nr, nc);
        }
      }
    }
  }
  return labels;
}

Eigen::ArrayXXi watershed(const Eigen::ArrayXXd& elevation, const BoolArray& eligible,
                          std::span<const geo::CellIndex> seeds) {
  const Eigen::Index rows = elevation.rows(), cols = elevation.cols();
  Eigen::ArrayXXi labels = Eigen::ArrayXXi::Zero(rows, cols);
  using Entry = std::tuple<double, std::size_t, int, int>;  // elevation, order, row, col
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  std::size_t order = 0;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto& s = seeds[i];
    if (labels(s.row, s.col) != 0) continue;
    labels(s.row, s.col) = static_cast<int>(i) + 1;
    queue.emplace(elevation(s.row, s.col), order++, s.row, s.col);
  }
  while (!queue.empty()) {
    const auto [elev, ord, r, c] = queue.top();
    queue.pop();
    for (const auto& d : kNeighbours) {
      const int nr = r + d[0], nc = c + d[1];
      if (nr < 0 || nc < 0 || nr >= rows || nc >= cols) continue;
      if (!eligible(nr, nc) || labels(nr, nc) != 0) continue;
      labels(nr, nc) = labels(r, c);
      queue.emplace(elevation(nr, nc), order++, nr, nc);
    }
  }
  return labels;
}

namespace {

BoolArray water_cells(const geo::GridSpec& grid, const geo::LandMask* mask) {
  BoolArray water = BoolArray::Constant(grid.rows(), grid.cols(), true);
  if (!mask) return water;
  for (int r = 0; r < grid.rows(); ++r) {
    for (int c = 0; c < grid.cols(); ++c) {
      try {
        water(r, c) = !mask->is_land(grid.cell_center(r, c));
      } catch (const CoverageError&) {
        water(r, c) = true;
      }
    }
  }
  return water;
}

// Component barycenter in index space, snapped to the nearest member cell.
std::vector<geo::CellIndex> component_seeds(const Eigen::ArrayXXi& labels, int count,
                                            const Eigen::ArrayXXd& weight) {
  std::vector<double> wr(count, 0.0), wc(count, 0.0), w(count, 0.0);
  for (Eigen::Index r = 0; r < labels.rows(); ++r) {
    for (Eigen::Index c = 0; c < labels.cols(); ++c) {
      const int l = labels(r, c);
      if (l == 0) continue;
      const double v = weight(r, c);
      wr[l - 1] += v * static_cast<double>(r);
      wc[l - 1] += v * static_cast<double>(c);
      w[l - 1] += v;
    }
  }
  std::vector<geo::CellIndex> seeds(count);
  std::vector<double> best(count, std::numeric_limits<double>::infinity());
  for (Eigen::Index r = 0; r < labels.rows(); ++r) {
    for (Eigen::Index c = 0; c < labels.cols(); ++c) {
      const int l = labels(r, c);
      if (l == 0) continue;
      const double br = wr[l - 1] / w[l - 1], bc = wc[l - 1] / w[l - 1];
      const double d = std::hypot(static_cast<double>(r) - br, static_cast<double>(c) - bc);
      if (d < best[l - 1]) {
        best[l - 1] = d;
        seeds[l - 1] = {static_cast<int>(r), static_cast<int>(c)};
      }
    }
  }
  return seeds;
}

void dilate(Eigen::ArrayXXi& labels, const BoolArray& water, int count, std::size_t min_cells) {
  std::vector<std::vector<std::pair<int, int>>> members(count + 1);
  for (Eigen::Index c = 0; c < labels.cols(); ++c) {
    for (Eigen::Index r = 0; r < labels.rows(); ++r) {
      if (labels(r, c) != 0) members[labels(r, c)].emplace_back(static_cast<int>(r), static_cast<int>(c));
    }
  }
  for (int id = 1; id <= count; ++id) {
    auto& cells = members[id];
    while (cells.size() < min_cells) {
      std::vector<std::pair<int, int>> ring;
      for (const auto& [r, c] : cells) {
        for (const auto& d : kNeighbours) {
          const int nr = r + d[0], nc = c + d[1];
          if (nr < 0 || nc < 0 || nr >= labels.rows() || nc >= labels.cols()) continue;
          if (labels(nr, nc) != 0 || !water(nr, nc)) continue;
          ring.emplace_back(nr, nc);
        }
      }
      std::sort(ring.begin(), ring.end());
      ring.erase(std::unique(ring.begin(), ring.end()), ring.end());
      if (ring.empty()) break;
      for (const auto& [r, c] : ring) labels(r, c) = id;
      cells.insert(cells.end(), ring.begin(), ring.end());
    }
  }
}

}  // namespace

std::vector<PortArea> find_ports(const Eigen::ArrayXXd& density, const geo::GridSpec& grid,
                                 const PortParams& params, const geo::LandMask* mask) {
  if (density.rows() != grid.rows() || density.cols() != grid.cols()) {
    throw InvalidArgument("density map does not match the grid");
  }
  const Eigen::ArrayXXd smooth = gaussian_smooth(density, params.sigma_cells);
  const BoolArray water = water_cells(grid, mask);
  const BoolArray above = (smooth > params.threshold) && water;
  int regions = 0;
  const Eigen::ArrayXXi components = label_components(above, regions);
  if (regions == 0) return {};
  const auto seeds = component_seeds(components, regions, smooth);
  const BoolArray eligible = (smooth > 0.5 * params.threshold) && water;
  Eigen::ArrayXXi labels = watershed(-smooth, eligible, seeds);
  dilate(labels, water, regions, params.min_cells);

  std::vector<PortArea> ports(regions);
  std::vector<double> w(regions, 0.0), wlat(regions, 0.0), wlon(regions, 0.0);
  for (int r = 0; r < grid.rows(); ++r) {
    for (int c = 0; c < grid.cols(); ++c) {
      const int l = labels(r, c);
      if (l == 0) continue;
      auto& p = ports[l - 1];
      p.cells.push_back({r, c});
      p.area_km2 += grid.cell_area_km2(r);
      const auto center = grid.cell_center(r, c);
      w[l - 1] += density(r, c);
      wlat[l - 1] += density(r, c) * center.lat;
      wlon[l - 1] += density(r, c) * center.lon;
    }
  }
  for (int i = 0; i < regions; ++i) {
    auto& p = ports[i];
    p.id = i + 1;
    if (w[i] > 0.0) {
      p.barycenter = {wlat[i] / w[i], wlon[i] / w[i]};
    } else {
      double lat = 0.0, lon = 0.0;
      for (const auto& cell : p.cells) {
        const auto center = grid.cell_center(cell.row, cell.col);
        lat += center.lat;
        lon += center.lon;
      }
      p.barycenter = {lat / static_cast<double>(p.cells.size()), lon / static_cast<double>(p.cells.size())};
    }
  }
  port_occupancy(ports, density, grid);
  return ports;
}

Eigen::ArrayXXi port_labels(std::span<const PortArea> ports, const geo::GridSpec& grid) {
  Eigen::ArrayXXi labels = Eigen::ArrayXXi::Zero(grid.rows(), grid.cols());
  for (const auto& p : ports) {
    for (const auto& c : p.cells) labels(c.row, c.col) = p.id;
  }
  return labels;
}

void port_occupancy(std::span<PortArea> ports, const Eigen::ArrayXXd& density, const geo::GridSpec& grid) {
  for (auto& p : ports) {
    p.vessels_in_port = 0.0;
    for (const auto& c : p.cells) p.vessels_in_port += density(c.row, c.col) * grid.cell_area_km2(c.row);
  }
}

namespace {

bool is_kiel(const std::optional<std::string>& area) { return area && *area == ingest::kKielCanal; }

const std::string* destination_at(const std::vector<cleanse::DestinationReport>& reports, Timestamp t) {
  auto it = std::upper_bound(reports.begin(), reports.end(), t,
                             [](Timestamp v, const cleanse::DestinationReport& r) { return v < r.time; });
  if (it == reports.begin()) return nullptr;
  return &std::prev(it)->destination;
}

}  // namespace

void port_arrivals(std::span<PortArea> ports, std::span<const Journey> journeys, const geo::GridSpec& grid,
                   double period_days, const DestinationLookup& destinations) {
  const Eigen::ArrayXXi labels = port_labels(ports, grid);
  std::unordered_map<int, std::size_t> index;
  for (std::size_t i = 0; i < ports.size(); ++i) index[ports[i].id] = i;
  std::vector<std::map<std::string, std::size_t>> dest_counts(ports.size());
  for (auto& p : ports) p.arrivals = 0;

  auto label_at = [&](const GeoPoint& p) {
    const auto cell = geo::try_cell_index(p, grid);
    return cell ? labels(cell->row, cell->col) : 0;
  };
  for (const auto& j : journeys) {
    const auto dest_it = destinations.find(j.mmsi);
    for (std::size_t k = 0; k < j.legs.size(); ++k) {
      const auto* t = std::get_if<Trajectory>(&j.legs[k]);
      if (!t) continue;
      const int end_label = label_at(t->route.waypoints.back());
      if (end_label == 0) continue;
      const auto* next = k + 1 < j.legs.size() ? std::get_if<AbsentPeriod>(&j.legs[k + 1]) : nullptr;
      const auto* prev = k > 0 ? std::get_if<AbsentPeriod>(&j.legs[k - 1]) : nullptr;
      const bool into_canal = next ? is_kiel(next->exit_area) : (k + 1 == j.legs.size() && is_kiel(j.final_exit_area));
      const bool from_canal = prev ? is_kiel(prev->entry_area) : (k == 0 && is_kiel(j.initial_entry_area));
      if (into_canal) continue;
      if (label_at(t->route.waypoints.front()) == end_label && !from_canal) continue;
      const auto i = index.at(end_label);
      ++ports[i].arrivals;
      if (dest_it != destinations.end()) {
        if (const auto* d = destination_at(dest_it->second, t->end_time)) ++dest_counts[i][*d];
      }
    }
  }
  for (std::size_t i = 0; i < ports.size(); ++i) {
    ports[i].arrivals_per_day = period_days > 0.0 ? static_cast<double>(ports[i].arrivals) / period_days : 0.0;
    std::size_t best = 0;
    ports[i].top_destination.clear();
    for (const auto& [name, n] : dest_counts[i]) {
      if (n > best) {
        best = n;
        ports[i].top_destination = name;
      }
    }
  }
}

void coast_distances(std::span<PortArea> ports, const geo::LandMask& mask, double max_search_m) {
  const auto& raster = mask.raster();
  const Eigen::Index rows = raster.rows(), cols = raster.cols();
  for (auto& p : ports) {
    p.coast_distance_m = -1.0;
    const double cell_h = geo::deg2rad(raster.dy) * geo::kEarthRadius;
    const double cell_w = geo::deg2rad(raster.dx) * geo::kEarthRadius * std::cos(geo::deg2rad(p.barycenter.lat));
    const double step = std::min(cell_h, cell_w);
    if (!(step > 0.0)) continue;
    const auto r0 = static_cast<Eigen::Index>(std::floor((p.barycenter.lat - raster.yll) / raster.dy));
    const auto c0 = static_cast<Eigen::Index>(std::floor((p.barycenter.lon - raster.xll) / raster.dx));
    double best = std::numeric_limits<double>::infinity();
    const auto max_ring = static_cast<Eigen::Index>(std::ceil(max_search_m / step)) + 1;
    for (Eigen::Index k = 0; k <= max_ring; ++k) {
      if (static_cast<double>(k - 1) * step > std::min(best, max_search_m)) break;
      for (Eigen::Index r = r0 - k; r <= r0 + k; ++r) {
        for (Eigen::Index c = c0 - k; c <= c0 + k; ++c) {
          if (std::max(std::abs(r - r0), std::abs(c - c0)) != k) continue;
          if (r < 0 || c < 0 || r >= rows || c >= cols) continue;
          const double v = raster.values(r, c);
          if (v == raster.nodata || !(v > mask.threshold())) continue;
          const GeoPoint center{raster.yll + (static_cast<double>(r) + 0.5) * raster.dy,
                                raster.xll + (static_cast<double>(c) + 0.5) * raster.dx};
          best = std::min(best, geo::distance_m(p.barycenter, center));
        }
      }
    }
    if (best <= max_search_m) p.coast_distance_m = best;
  }
}

}  // namespace seatrace::ports
