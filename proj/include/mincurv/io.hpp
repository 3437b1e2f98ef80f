#pragma once

// Legacy VTK, CSV and plain-text writers, and the point CSV reader.

#include <filesystem>
#include <string>

#include "mincurv/core_geometry.hpp"
#include "mincurv/eps_convexity.hpp"

namespace mincurv {

/// ASCII STRUCTURED_POINTS file with one SCALARS double array.
void write_vtk(const std::filesystem::path& path, const GridField& field, const std::string& name = "u");
/// Mask exported as 0/1 scalars.
void write_vtk(const std::filesystem::path& path, const BoolMask& mask, const std::string& name = "mask");

/// Rows i,j,k,value.
void write_field_csv(const std::filesystem::path& path, const GridField& field);
/// Rows x,y[,z].
void write_points_csv(const std::filesystem::path& path, const PointSet& points);
std::string points_csv(const PointSet& points);
/// Rows piece,x,y[,z] listing the generators of each piece.
void write_complex_csv(const std::filesystem::path& path, const SegmentComplex& complex);

/// Reads x,y[,z] rows; blank lines, '#' comments and a non-numeric header are skipped.
/// Throws ConfigError on ragged or malformed rows.
PointSet read_points_csv(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);

/// Fixed-point with four decimals, as used in snapshot names.
std::string format_time(double t);
/// Shortest round-trip representation; "nan" for NaN.
std::string format_number(double v);

}  // namespace mincurv
