#include "seatrace/ascii_grid.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "seatrace/errors.hpp"

namespace seatrace {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool starts_numeric(const std::string& token) {
  if (token.empty()) return false;
  const char c = token.front();
  return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.';
}

}  // namespace

AsciiGrid read_ascii_grid(std::istream& in) {
  std::map<std::string, double> header;
  std::string token;
  std::optional<double> first_value;
  while (in >> token) {
    if (starts_numeric(token)) {
      first_value = std::stod(token);
      break;
    }
    double value = 0.0;
    if (!(in >> value)) throw FormatError("ascii grid: missing value for header key " + token);
    header[lower(token)] = value;
  }
  auto need = [&](const char* key) {
    auto it = header.find(key);
    if (it == header.end()) throw FormatError(std::string("ascii grid: missing header ") + key);
    return it->second;
  };
  const auto ncols = static_cast<Eigen::Index>(need("ncols"));
  const auto nrows = static_cast<Eigen::Index>(need("nrows"));
  if (ncols <= 0 || nrows <= 0) throw FormatError("ascii grid: empty raster");

  AsciiGrid grid;
  if (header.count("cellsize")) {
    grid.dx = grid.dy = header["cellsize"];
  } else {
    grid.dx = need("dx");
    grid.dy = need("dy");
  }
  if (header.count("xllcorner")) {
    grid.xll = header["xllcorner"];
  } else {
    grid.xll = need("xllcenter") - grid.dx / 2.0;
  }
  if (header.count("yllcorner")) {
    grid.yll = header["yllcorner"];
  } else {
    grid.yll = need("yllcenter") - grid.dy / 2.0;
  }
  if (header.count("nodata_value")) grid.nodata = header["nodata_value"];

  grid.values.resize(nrows, ncols);
  Eigen::Index n = 0;
  const Eigen::Index total = nrows * ncols;
  auto put = [&](double v) {
    const Eigen::Index file_row = n / ncols;
    grid.values(nrows - 1 - file_row, n % ncols) = v;
    ++n;
  };
  if (!first_value) throw FormatError("ascii grid: no data");
  put(*first_value);
  double v = 0.0;
  while (n < total && in >> v) put(v);
  if (n != total) {
    throw FormatError(fmt::format("ascii grid: expected {} values, read {}", total, n));
  }
  return grid;
}

AsciiGrid read_ascii_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open raster " + path.string());
  return read_ascii_grid(in);
}

void write_ascii_grid(std::ostream& out, const AsciiGrid& grid) {
  fmt::print(out, "ncols {}\nnrows {}\nxllcorner {}\nyllcorner {}\n", grid.cols(),
             grid.rows(), grid.xll, grid.yll);
  fmt::print(out, "dx {}\ndy {}\nNODATA_value {}\n", grid.dx, grid.dy, grid.nodata);
  std::string line;
  for (Eigen::Index r = grid.rows() - 1; r >= 0; --r) {
    line.clear();
    for (Eigen::Index c = 0; c < grid.cols(); ++c) {
      if (c) line.push_back(' ');
      fmt::format_to(std::back_inserter(line), "{:.10g}", grid.values(r, c));
    }
    line.push_back('\n');
    out << line;
  }
}

void write_ascii_grid(const std::filesystem::path& path, const AsciiGrid& grid) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write raster " + path.string());
  write_ascii_grid(out, grid);
}

}  // namespace seatrace
