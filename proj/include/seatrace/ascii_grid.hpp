#pragma once

#include <filesystem>
#include <iosfwd>

#include <Eigen/Dense>

namespace seatrace {

/// Single-band ESRI ASCII raster. `values(0, c)` is the southernmost row;
/// the file stores rows north to south and the reader/writer flip them.
struct AsciiGrid {
  Eigen::ArrayXXd values;
  double xll = 0.0;  // west edge
  double yll = 0.0;  // south edge
  double dx = 1.0;
  double dy = 1.0;
  double nodata = -9999.0;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

/// Accepts `cellsize` or `dx`/`dy`, and corner or center registration.
AsciiGrid read_ascii_grid(std::istream& in);
AsciiGrid read_ascii_grid(const std::filesystem::path& path);

void write_ascii_grid(std::ostream& out, const AsciiGrid& grid);
void write_ascii_grid(const std::filesystem::path& path, const AsciiGrid& grid);

}  // namespace seatrace
