#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "tightknot/geometry.hpp"

namespace tightknot {

using BigInt = boost::multiprecision::cpp_int;

struct Crossing {
  std::size_t over_edge = 0;
  std::size_t under_edge = 0;
  double over_param = 0.0;   // position along the over edge, in (0, 1)
  double under_param = 0.0;  // position along the under edge, in (0, 1)
  int sign = 0;              // +1 right-handed, -1 left-handed
};

struct CrossingVisit {
  std::size_t crossing = 0;
  bool over = false;
};

// Planar projection of a single-component knot along `direction`; the
// viewer sits at +infinity along it, so the over strand is the one with the
// larger height. Crossings are numbered in order of first visit from vertex 0.
struct Diagram {
  Point3 direction = Point3::UnitZ();
  std::vector<Crossing> crossings;
  std::vector<CrossingVisit> strand_order;

  int writhe() const;  // sum of crossing signs
};

// Throws ErrorKind::kTopology when the direction is not generic (vertex on a
// projected edge, overlapping or degenerate projected edges, coincident
// crossings) and kInvalidArgument for multi-component input.
Diagram project_to_diagram(const PolygonalKnot& knot, const Point3& direction);

// Deterministic low-discrepancy directions on the unit sphere.
std::vector<Point3> sphere_directions(std::size_t count, std::uint64_t seed = 0);

// Tries `preferred` first, then the seeded sequence; up to `attempts` total.
Diagram project_generic(const PolygonalKnot& knot, const Point3& preferred = Point3::UnitZ(),
                        std::uint64_t seed = 0, int attempts = 50);

// Gauss code, e.g. "O1+ U2+ O3+ U1+ O2+ U3+".
std::string gauss_code(const Diagram& diagram);

struct DeterminantResult {
  BigInt determinant = 1;
  Point3 projection_direction = Point3::UnitZ();
  std::size_t crossing_count = 0;
};

// |Delta(-1)| from the Goeritz matrix of a checkerboard colouring.
DeterminantResult determinant(const Diagram& diagram);

// Convenience: generic projection plus determinant.
DeterminantResult knot_determinant(const PolygonalKnot& knot, std::uint64_t seed = 0);

struct TopologyCheck {
  bool same = false;  // necessary, not sufficient, for isotopy
  DeterminantResult before;
  DeterminantResult after;
};

TopologyCheck verify_topology(const PolygonalKnot& before, const PolygonalKnot& after,
                              std::uint64_t seed = 0);

// |det| of an integer matrix by fraction-free elimination.
BigInt bareiss_determinant(std::vector<std::vector<BigInt>> m);

}  // namespace tightknot
