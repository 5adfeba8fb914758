#pragma once

// Spherical geometry and grid primitives.

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "seatrace/ascii_grid.hpp"
#include "seatrace/model.hpp"

namespace seatrace::geo {

/// Mean Earth radius (IUGG R1). All distances use this sphere.
inline constexpr double kEarthRadius = 6371008.8;
inline constexpr double kKnot = 1852.0 / 3600.0;  // m/s

template <typename Scalar>
constexpr Scalar deg2rad(Scalar deg) {
  return deg * std::numbers::pi_v<Scalar> / Scalar(180);
}

template <typename Scalar>
constexpr Scalar rad2deg(Scalar rad) {
  return rad * Scalar(180) / std::numbers::pi_v<Scalar>;
}

/// Haversine central angle in radians.
template <typename Scalar>
Scalar central_angle(Scalar lat1, Scalar lon1, Scalar lat2, Scalar lon2) {
  using std::asin, std::cos, std::min, std::sin, std::sqrt;
  const Scalar p1 = deg2rad(lat1), p2 = deg2rad(lat2);
  const Scalar dp = p2 - p1, dl = deg2rad(lon2 - lon1);
  const Scalar s1 = sin(dp / 2), s2 = sin(dl / 2);
  const Scalar h = s1 * s1 + cos(p1) * cos(p2) * s2 * s2;
  return Scalar(2) * asin(min(Scalar(1), sqrt(h)));
}

double distance_m(const GeoPoint& a, const GeoPoint& b);

/// Initial great-circle bearing in [0, 360). Throws InvalidArgument if a == b.
double bearing_deg(const GeoPoint& a, const GeoPoint& b);

Eigen::Vector3d to_unit(const GeoPoint& p);
GeoPoint from_unit(const Eigen::Vector3d& v);

/// Point at fraction f in [0, 1] along the great circle a -> b.
GeoPoint interpolate(const GeoPoint& a, const GeoPoint& b, double f);
GeoPoint midpoint(const GeoPoint& a, const GeoPoint& b);
GeoPoint destination(const GeoPoint& start, double bearing_deg, double distance);

/// Samples a -> b inclusive of both ends with spacing `step`; the final
/// interval may be shorter.
std::vector<GeoPoint> sample_path(const GeoPoint& a, const GeoPoint& b, double step);

/// Great-circle distance from p to the arc a -> b.
double distance_to_segment_m(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b);

/// Fraction in [0, 1] of the foot of p on the arc a -> b (clamped).
double project_onto_segment(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b);

/// Width and height in meters of the lat/lon bounding box of `points`, the
/// width measured at the box's mean latitude.
Eigen::Vector2d bbox_extent_m(const std::vector<GeoPoint>& points);

/// Mean chord length through a w x h rectangle of lines at bearing `alpha`
/// (clockwise from the h edge), with r = w / h.
template <typename Scalar>
Scalar mean_segment_length(Scalar alpha_deg, Scalar r, Scalar h) {
  using std::abs, std::cos, std::sin;
  const Scalar a = deg2rad(alpha_deg);
  return r * h / (r * abs(cos(a)) + abs(sin(a)));
}

struct CellIndex {
  int row = 0;
  int col = 0;
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Regular lat/lon grid; row 0 is the southernmost row.
struct GridSpec {
  double lat_min = 53.0;
  double lat_max = 66.0;
  double lon_min = 9.0;
  double lon_max = 32.0;
  double dlat = 15.0 / 3600.0;
  double dlon = 30.0 / 3600.0;

  int rows() const;
  int cols() const;
  double cell_height_m() const;
  double cell_width_m(int row) const;
  double cell_area_km2(int row) const;
  GeoPoint cell_center(int row, int col) const;
  bool contains(const GeoPoint& p) const;
};

/// Throws OutOfRange outside the grid bounds.
CellIndex cell_index(const GeoPoint& p, const GridSpec& grid);
std::optional<CellIndex> try_cell_index(const GeoPoint& p, const GridSpec& grid);

/// Elevation raster queried by nearest cell; elevations strictly above the
/// threshold count as land.
class LandMask {
 public:
  explicit LandMask(AsciiGrid elevation, double threshold = 2.0);

  /// Throws CoverageError outside the raster or on nodata cells.
  double elevation_at(const GeoPoint& p) const;
  bool is_land(const GeoPoint& p) const { return elevation_at(p) > threshold_; }
  double threshold() const { return threshold_; }
  const AsciiGrid& raster() const { return elevation_; }

 private:
  AsciiGrid elevation_;
  double threshold_;
};

bool crosses_land(const GeoPoint& a, const GeoPoint& b, const LandMask& mask, double step = 100.0);

}  // namespace seatrace::geo
