#include "seatrace/geo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "seatrace/errors.hpp"

namespace seatrace::geo {

double distance_m(const GeoPoint& a, const GeoPoint& b) {
  return kEarthRadius * central_angle(a.lat, a.lon, b.lat, b.lon);
}

double bearing_deg(const GeoPoint& a, const GeoPoint& b) {
  if (a == b) throw InvalidArgument("bearing undefined for coincident points");
  const double p1 = deg2rad(a.lat), p2 = deg2rad(b.lat);
  const double dl = deg2rad(b.lon - a.lon);
  const double y = std::sin(dl) * std::cos(p2);
  const double x = std::cos(p1) * std::sin(p2) - std::sin(p1) * std::cos(p2) * std::cos(dl);
  double deg = std::fmod(rad2deg(std::atan2(y, x)) + 360.0, 360.0);
  if (deg >= 360.0) deg -= 360.0;
  return deg;
}

Eigen::Vector3d to_unit(const GeoPoint& p) {
  const double phi = deg2rad(p.lat), lam = deg2rad(p.lon);
  return {std::cos(phi) * std::cos(lam), std::cos(phi) * std::sin(lam), std::sin(phi)};
}

GeoPoint from_unit(const Eigen::Vector3d& v) {
  const Eigen::Vector3d u = v.normalized();
  const double lat = rad2deg(std::atan2(u.z(), std::hypot(u.x(), u.y())));
  const double lon = rad2deg(std::atan2(u.y(), u.x()));
  return GeoPoint{lat, lon >= 180.0 ? lon - 360.0 : lon};
}

GeoPoint interpolate(const GeoPoint& a, const GeoPoint& b, double f) {
  if (f <= 0.0) return a;
  if (f >= 1.0) return b;
  const Eigen::Vector3d ua = to_unit(a), ub = to_unit(b);
  const double omega = std::atan2(ua.cross(ub).norm(), ua.dot(ub));
  if (omega < 1e-12) {
    return GeoPoint{a.lat + f * (b.lat - a.lat), a.lon + f * (b.lon - a.lon)};
  }
  const double s = std::sin(omega);
  const Eigen::Vector3d v = (std::sin((1.0 - f) * omega) / s) * ua + (std::sin(f * omega) / s) * ub;
  return from_unit(v);
}

GeoPoint midpoint(const GeoPoint& a, const GeoPoint& b) { return interpolate(a, b, 0.5); }

GeoPoint destination(const GeoPoint& start, double bearing, double distance) {
  const double delta = distance / kEarthRadius;
  const double theta = deg2rad(bearing);
  const double p1 = deg2rad(start.lat), l1 = deg2rad(start.lon);
  const double p2 =
      std::asin(std::sin(p1) * std::cos(delta) + std::cos(p1) * std::sin(delta) * std::cos(theta));
  const double l2 = l1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(p1),
                                    std::cos(delta) - std::sin(p1) * std::sin(p2));
  return GeoPoint::checked(rad2deg(p2), rad2deg(l2));
}

std::vector<GeoPoint> sample_path(const GeoPoint& a, const GeoPoint& b, double step) {
  if (!(step > 0.0)) throw InvalidArgument("sample step must be positive");
  const double d = distance_m(a, b);
  if (d == 0.0) return {a};
  const auto n = static_cast<std::size_t>(std::floor(d / step + 1e-9));
  std::vector<GeoPoint> out;
  out.reserve(n + 2);
  for (std::size_t k = 0; k <= n; ++k) {
    out.push_back(interpolate(a, b, static_cast<double>(k) * step / d));
  }
  if (d - static_cast<double>(n) * step > 1e-6) {
    out.push_back(b);
  } else {
    out.back() = b;
  }
  return out;
}

namespace {

struct ArcFoot {
  double along = 0.0;  // signed angle from a to the foot of p
  double omega = 0.0;  // angle a -> b
  double cross = 0.0;  // sine of the cross-track angle
};

std::optional<ArcFoot> arc_foot(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) {
  const Eigen::Vector3d ua = to_unit(a), ub = to_unit(b), up = to_unit(p);
  Eigen::Vector3d n = ua.cross(ub);
  const double nn = n.norm();
  if (nn < 1e-15) return std::nullopt;
  n /= nn;
  ArcFoot foot;
  foot.cross = up.dot(n);
  const Eigen::Vector3d f = up - foot.cross * n;
  foot.along = std::atan2(ua.cross(f).dot(n), ua.dot(f));
  foot.omega = std::atan2(nn, ua.dot(ub));
  return foot;
}

}  // namespace

double distance_to_segment_m(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) {
  const auto foot = arc_foot(p, a, b);
  if (foot && foot->along >= 0.0 && foot->along <= foot->omega) {
    return kEarthRadius * std::asin(std::min(1.0, std::abs(foot->cross)));
  }
  return std::min(distance_m(p, a), distance_m(p, b));
}

double project_onto_segment(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) {
  const auto foot = arc_foot(p, a, b);
  if (!foot) return 0.0;
  return std::clamp(foot->along / foot->omega, 0.0, 1.0);
}

Eigen::Vector2d bbox_extent_m(const std::vector<GeoPoint>& points) {
  if (points.empty()) return Eigen::Vector2d::Zero();
  double lat_lo = points.front().lat, lat_hi = lat_lo;
  double lon_lo = points.front().lon, lon_hi = lon_lo;
  for (const auto& p : points) {
    lat_lo = std::min(lat_lo, p.lat);
    lat_hi = std::max(lat_hi, p.lat);
    lon_lo = std::min(lon_lo, p.lon);
    lon_hi = std::max(lon_hi, p.lon);
  }
  const double mean_lat = 0.5 * (lat_lo + lat_hi);
  return {deg2rad(lon_hi - lon_lo) * kEarthRadius * std::cos(deg2rad(mean_lat)),
          deg2rad(lat_hi - lat_lo) * kEarthRadius};
}

int GridSpec::rows() const {
  return static_cast<int>(std::ceil((lat_max - lat_min) / dlat - 1e-9));
}

int GridSpec::cols() const {
  return static_cast<int>(std::ceil((lon_max - lon_min) / dlon - 1e-9));
}

double GridSpec::cell_height_m() const { return deg2rad(dlat) * kEarthRadius; }

double GridSpec::cell_width_m(int row) const {
  const double lat = lat_min + (row + 0.5) * dlat;
  return deg2rad(dlon) * kEarthRadius * std::cos(deg2rad(lat));
}

double GridSpec::cell_area_km2(int row) const {
  return cell_height_m() * cell_width_m(row) * 1e-6;
}

GeoPoint GridSpec::cell_center(int row, int col) const {
  return GeoPoint{lat_min + (row + 0.5) * dlat, lon_min + (col + 0.5) * dlon};
}

bool GridSpec::contains(const GeoPoint& p) const {
  return p.lat >= lat_min && p.lat <= lat_max && p.lon >= lon_min && p.lon <= lon_max;
}

std::optional<CellIndex> try_cell_index(const GeoPoint& p, const GridSpec& grid) {
  if (!grid.contains(p)) return std::nullopt;
  const int row = static_cast<int>(std::floor((p.lat - grid.lat_min) / grid.dlat + 1e-9));
  const int col = static_cast<int>(std::floor((p.lon - grid.lon_min) / grid.dlon + 1e-9));
  return CellIndex{std::min(row, grid.rows() - 1), std::min(col, grid.cols() - 1)};
}

CellIndex cell_index(const GeoPoint& p, const GridSpec& grid) {
  auto idx = try_cell_index(p, grid);
  if (!idx) throw OutOfRange(fmt::format("point ({}, {}) outside grid", p.lat, p.lon));
  return *idx;
}

LandMask::LandMask(AsciiGrid elevation, double threshold)
    : elevation_(std::move(elevation)), threshold_(threshold) {
  if (elevation_.rows() == 0 || elevation_.cols() == 0) throw InvalidArgument("empty land mask");
}

double LandMask::elevation_at(const GeoPoint& p) const {
  const auto& g = elevation_;
  const double fx = (p.lon - g.xll) / g.dx;
  const double fy = (p.lat - g.yll) / g.dy;
  const auto cols = static_cast<double>(g.cols()), rows = static_cast<double>(g.rows());
  if (!(fx >= 0.0 && fx <= cols && fy >= 0.0 && fy <= rows)) {
    throw CoverageError(fmt::format("land mask has no coverage at ({}, {})", p.lat, p.lon));
  }
  const auto c = std::min<Eigen::Index>(static_cast<Eigen::Index>(fx), g.cols() - 1);
  const auto r = std::min<Eigen::Index>(static_cast<Eigen::Index>(fy), g.rows() - 1);
  const double v = g.values(r, c);
  if (v == g.nodata) {
    throw CoverageError(fmt::format("land mask nodata at ({}, {})", p.lat, p.lon));
  }
  return v;
}

bool crosses_land(const GeoPoint& a, const GeoPoint& b, const LandMask& mask, double step) {
  for (const auto& s : sample_path(a, b, step)) {
    if (mask.is_land(s)) return true;
  }
  return false;
}

}  // namespace seatrace::geo
