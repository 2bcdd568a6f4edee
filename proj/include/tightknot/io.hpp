#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tightknot/geometry.hpp"

namespace tightknot {

enum class CoordinateFormat {
  kPlain,  // one "x y z" per line, blank line between components, '#' comments
  kVect,   // Geomview VECT polylines (closed components have negative counts)
};

struct KnotFile {
  std::string label;
  std::vector<std::vector<Point3>> components;

  std::size_t vertex_count() const;
  PolygonalKnot to_knot() const;
  static KnotFile from_knot(const PolygonalKnot& knot);
};

// Detects the format from the first non-blank, non-comment line ("VECT"
// selects the vector format). Errors carry the 1-based line number.
KnotFile parse_coordinates(std::string_view text);
std::string write_coordinates(const KnotFile& file, CoordinateFormat format = CoordinateFormat::kPlain);

KnotFile read_knot_file(const std::filesystem::path& path);
void write_knot_file(const std::filesystem::path& path, const KnotFile& file,
                     CoordinateFormat format = CoordinateFormat::kPlain);

// Trigonometric coefficients for one coordinate: value(t) =
// sum_j cos_coeffs[j-1] cos(2 pi j t) + sin_coeffs[j-1] sin(2 pi j t).
struct FourierSeries {
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;
};

struct FourierKnotSpec {
  std::string label;
  FourierSeries x, y, z;

  bool empty() const;
};

// Text layout, one series per line:
//   label <name>            (optional)
//   x cos a1 a2 ...
//   x sin b1 b2 ...
// and likewise for y and z. Missing lines mean zero coefficients.
FourierKnotSpec parse_fourier_spec(std::string_view text);
std::string write_fourier_spec(const FourierKnotSpec& spec);

PolygonalKnot sample_fourier(const FourierKnotSpec& spec, std::size_t n);

// x = sin t + 2 sin 2t, y = cos t - 2 cos 2t, z = -sin 3t
FourierKnotSpec trefoil_spec();
// Three-harmonic figure-eight (coefficients of order 100).
FourierKnotSpec figure_eight_spec();

// Closed necklace of `links` rings, each linked with its two neighbours,
// ring planes alternating; thickness is above 1 as generated.
KnotFile make_hopf_chain(std::size_t links, std::size_t vertices_per_link);

// Regular n-gon in the xy-plane with the given circumradius.
PolygonalKnot regular_polygon(std::size_t n, double circumradius = 1.0);

// 17 significant digits; round-trips exactly through from_chars.
std::string format_real(double value);
double parse_real(std::string_view token);

}  // namespace tightknot
