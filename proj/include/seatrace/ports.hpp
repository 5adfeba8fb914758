#pragma once

// Port areas from the density map: smoothing, seeded watershed, dilation.

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "seatrace/cleanse.hpp"
#include "seatrace/geo.hpp"
#include "seatrace/model.hpp"

namespace seatrace::ports {

struct PortParams {
  double threshold = 0.5;  // vessels per km^2
  double sigma_cells = 1.5;
  std::size_t min_cells = 3;
};

struct PortArea {
  int id = 0;
  std::vector<geo::CellIndex> cells;  // row-major order
  GeoPoint barycenter;
  double area_km2 = 0.0;
  double vessels_in_port = 0.0;
  double arrivals_per_day = 0.0;
  std::size_t arrivals = 0;
  std::string top_destination;
  double coast_distance_m = -1.0;  // negative when no land mask is available
};

/// Separable Gaussian filter in cell units with clamped borders.
Eigen::ArrayXXd gaussian_smooth(const Eigen::ArrayXXd& values, double sigma_cells);

/// 8-connected components of `mask`; 0 is background, labels start at 1 in
/// row-major order of first appearance.
Eigen::ArrayXXi label_components(const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& mask, int& count);

/// Seeded flooding over `elevation` restricted to `eligible` cells; each
/// cell joins the basin of the seed that reaches it first from the lowest
/// elevation. Seed cells carry labels 1..n in order.
Eigen::ArrayXXi watershed(const Eigen::ArrayXXd& elevation,
                          const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& eligible,
                          std::span<const geo::CellIndex> seeds);

/// Segments the density map. `mask` marks land cells to keep out of ports.
std::vector<PortArea> find_ports(const Eigen::ArrayXXd& density, const geo::GridSpec& grid,
                                 const PortParams& params = {}, const geo::LandMask* mask = nullptr);

/// Label raster of port ids (0 outside any port).
Eigen::ArrayXXi port_labels(std::span<const PortArea> ports, const geo::GridSpec& grid);

/// Sum of density x cell area over each port's cells.
void port_occupancy(std::span<PortArea> ports, const Eigen::ArrayXXd& density, const geo::GridSpec& grid);

using DestinationLookup = std::unordered_map<Mmsi, std::vector<cleanse::DestinationReport>>;

/// Counts trajectory legs that end inside a port and start outside it.
/// Legs ending at the Kiel Canal gate before a canal passage are skipped;
/// legs leaving the canal count even when they start in the port.
void port_arrivals(std::span<PortArea> ports, std::span<const Journey> journeys, const geo::GridSpec& grid,
                   double period_days, const DestinationLookup& destinations = {});

/// Distance from each barycenter to the nearest land cell of `mask`.
void coast_distances(std::span<PortArea> ports, const geo::LandMask& mask, double max_search_m = 50e3);

}  // namespace seatrace::ports
