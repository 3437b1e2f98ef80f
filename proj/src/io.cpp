#include "mincurv/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "mincurv/errors.hpp"

namespace mincurv {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  return os;
}

void vtk_header(std::ostream& os, const GridSpec& g, const std::string& title) {
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET STRUCTURED_POINTS\n";
  os << "DIMENSIONS " << g.dims[0] << ' ' << g.dims[1] << ' ' << g.dims[2] << '\n';
  os << "ORIGIN " << format_number(g.origin[0]) << ' ' << format_number(g.origin[1]) << ' '
     << format_number(g.dim == 3 ? g.origin[2] : 0.0) << '\n';
  os << "SPACING " << format_number(g.spacing) << ' ' << format_number(g.spacing) << ' '
     << format_number(g.spacing) << '\n';
  os << "POINT_DATA " << g.size() << '\n';
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_time(double t) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", t);
  return buf;
}

void write_vtk(const std::filesystem::path& path, const GridField& field, const std::string& name) {
  auto os = open_out(path);
  vtk_header(os, field.spec(), name);
  os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
  for (double v : field.values()) os << format_number(v) << '\n';
}

void write_vtk(const std::filesystem::path& path, const BoolMask& mask, const std::string& name) {
  auto os = open_out(path);
  vtk_header(os, mask.spec(), name);
  os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
  for (auto b : mask.bits()) os << (b ? "1\n" : "0\n");
}

void write_field_csv(const std::filesystem::path& path, const GridField& field) {
  auto os = open_out(path);
  os << "i,j,k,value\n";
  const GridSpec& g = field.spec();
  for (std::size_t n = 0; n < g.size(); ++n) {
    const auto ijk = g.multi_index(n);
    os << ijk[0] << ',' << ijk[1] << ',' << ijk[2] << ',' << format_number(field.at(n)) << '\n';
  }
}

std::string points_csv(const PointSet& points) {
  std::ostringstream os;
  os << (points.dim() == 2 ? "x,y\n" : "x,y,z\n");
  for (const auto& p : points.points()) {
    for (int a = 0; a < p.dim(); ++a) os << (a ? "," : "") << format_number(p[a]);
    os << '\n';
  }
  return os.str();
}

void write_points_csv(const std::filesystem::path& path, const PointSet& points) {
  auto os = open_out(path);
  os << points_csv(points);
}

void write_complex_csv(const std::filesystem::path& path, const SegmentComplex& complex) {
  auto os = open_out(path);
  os << (complex.dim() == 2 ? "piece,x,y\n" : "piece,x,y,z\n");
  for (std::size_t i = 0; i < complex.pieces().size(); ++i) {
    for (const auto& v : complex.pieces()[i]) {
      os << i;
      for (int a = 0; a < v.dim(); ++a) os << ',' << format_number(v[a]);
      os << '\n';
    }
  }
}

PointSet read_points_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open " + path.string());
  std::string line;
  int dim = 0;
  std::vector<VecN> pts;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t\r");
      const auto e = cell.find_last_not_of(" \t\r");
      if (b == std::string::npos) {
        numeric = false;
        break;
      }
      const std::string t = cell.substr(b, e - b + 1);
      double v = 0.0;
      const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
      if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
        numeric = false;
        break;
      }
      vals.push_back(v);
    }
    if (!numeric) {
      if (pts.empty() && dim == 0) continue;  // header
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": malformed row");
    }
    if (dim == 0) dim = static_cast<int>(vals.size());
    if (static_cast<int>(vals.size()) != dim || (dim != 2 && dim != 3)) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected 2 or 3 columns consistently");
    }
    pts.push_back(dim == 2 ? VecN{vals[0], vals[1]} : VecN{vals[0], vals[1], vals[2]});
  }
  if (dim == 0) throw ConfigError(path.string() + ": no points");
  return PointSet(dim, pts);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto os = open_out(path);
  os << text;
}

}  // namespace mincurv
