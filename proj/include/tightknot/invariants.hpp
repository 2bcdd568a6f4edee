#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "tightknot/geometry.hpp"

namespace tightknot {

/// Contribution of the ordered-pair-free edge pair (i, j), i < j, to the
/// Gauss double integral. The full double sum counts each pair twice.
struct GaussPairContribution {
  std::size_t i = 0;
  std::size_t j = 0;
  double writhe_term = 0.0;  // signed solid angle / 4pi
  double acn_term = 0.0;     // unsigned
};

/// Signed solid angle / 4pi swept by segment pair (a0a1, b0b1); equals
/// (1/4pi) * int int (da x db) . (a - b) / |a - b|^3. Closed form for two
/// straight segments (quadrilateral of the four endpoints).
double gauss_pair_closed_form(const Point3& a0, const Point3& a1, const Point3& b0,
                              const Point3& b1);

/// Adaptive tensor Gauss-Legendre evaluation of the same integral. With
/// `absolute` the integrand's absolute value is integrated (ACN).
double gauss_pair_quadrature(const Point3& a0, const Point3& a1, const Point3& b0,
                             const Point3& b1, bool absolute = false, double tolerance = 1e-12);

/// Per-pair terms for all non-adjacent pairs, in (i, j) lexicographic order.
/// Pairs closer than 1e-7 x mean edge length use quadrature.
std::vector<GaussPairContribution> pair_contributions(const PolygonalKnot& knot);

struct WritheAcn {
  double writhe = 0.0;
  double acn = 0.0;
};

WritheAcn writhe_and_acn(const PolygonalKnot& knot);
double space_writhe(const PolygonalKnot& knot);
double average_crossing_number(const PolygonalKnot& knot);

/// (Wr(knot), Wr(mirror image)).
std::pair<double, double> writhe_mirror_check(const PolygonalKnot& knot);

}  // namespace tightknot
