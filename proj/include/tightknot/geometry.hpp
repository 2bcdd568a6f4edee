#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "tightknot/errors.hpp"

namespace tightknot {

using Point3 = Eigen::Vector3d;

// A closed polygonal curve, possibly with several components (only the
// Hopf-chain benchmark uses more than one). Edge i joins vertex i to
// next(i); within a component the vertices are stored contiguously and the
// last vertex wraps back to the first.
class PolygonalKnot {
 public:
  PolygonalKnot() = default;
  explicit PolygonalKnot(std::vector<Point3> vertices, std::string label = {});
  static PolygonalKnot from_components(const std::vector<std::vector<Point3>>& components,
                                       std::string label = {});

  std::size_t size() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const noexcept { return vertices_.size(); }
  std::span<const Point3> vertices() const noexcept { return vertices_; }
  const Point3& vertex(std::size_t i) const { return vertices_[i]; }
  const std::string& label() const noexcept { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  std::size_t next(std::size_t i) const { return next_[i]; }
  std::size_t prev(std::size_t i) const { return prev_[i]; }

  std::size_t component_count() const noexcept { return starts_.size() - 1; }
  std::size_t component_of(std::size_t vertex) const { return component_[vertex]; }
  // Half-open vertex index range [first, second) of component c.
  std::pair<std::size_t, std::size_t> component_range(std::size_t c) const {
    return {starts_[c], starts_[c + 1]};
  }
  std::vector<std::size_t> component_sizes() const;
  PolygonalKnot component(std::size_t c) const;

  // True when edges i and j share a vertex (or are the same edge).
  bool edges_adjacent(std::size_t i, std::size_t j) const {
    return i == j || next_[i] == j || next_[j] == i;
  }

  // Same component structure, new coordinates. Validates the result.
  PolygonalKnot with_vertices(std::vector<Point3> vertices) const;
  PolygonalKnot scaled(double factor) const;
  PolygonalKnot transformed(const Eigen::Matrix3d& linear, const Point3& offset) const;
  PolygonalKnot mirrored() const;  // negates z
  Point3 centroid() const;

 private:
  void build_topology(std::vector<std::size_t> sizes);
  void validate() const;

  std::vector<Point3> vertices_;
  std::vector<std::size_t> starts_{0};
  std::vector<std::size_t> next_;
  std::vector<std::size_t> prev_;
  std::vector<std::size_t> component_;
  std::string label_;
};

struct SegmentClosest {
  double distance = 0.0;
  double s = 0.0;  // parameter on the first segment, in [0, 1]
  double t = 0.0;  // parameter on the second segment, in [0, 1]
};

// Exact closest points between segments [a0, a1] and [b0, b1]. Parallel
// segments whose projections overlap report the middle of the overlap;
// otherwise the endpoint-to-segment minima decide.
SegmentClosest segment_closest(const Point3& a0, const Point3& a1, const Point3& b0,
                               const Point3& b1);

double point_segment_distance(const Point3& p, const Point3& a, const Point3& b);

double length(const PolygonalKnot& knot);
double edge_length(const PolygonalKnot& knot, std::size_t edge);
double mean_edge_length(const PolygonalKnot& knot);

// Turning-angle curvature radius min(e-, e+) / (2 tan(theta/2)) at a vertex;
// +inf for a straight vertex.
double turning_radius(const PolygonalKnot& knot, std::size_t vertex);

struct CurvatureBound {
  double radius = std::numeric_limits<double>::infinity();
  std::size_t vertex = 0;
};
CurvatureBound min_radius_of_curvature(const PolygonalKnot& knot);

// A locally-closest pair of points on two non-adjacent edges.
struct Strut {
  std::size_t edge_a = 0;
  std::size_t edge_b = 0;  // edge_a < edge_b
  double s = 0.0;
  double t = 0.0;
  double distance = 0.0;
};

enum class StrutSearch { kBruteForce, kGrid };

// True when the closest points of non-adjacent edges (i, j) are a local
// minimum of the self-distance along the curve at both ends. A positive
// `slack` (cosine of the allowed angle) also admits pairs that are nearly
// critical, i.e. would become critical after a small motion.
bool is_critical_pair(const PolygonalKnot& knot, std::size_t i, std::size_t j,
                      const SegmentClosest& closest, double slack = 0.0);

// All critical struts with distance <= cutoff, sorted by (edge_a, edge_b).
std::vector<Strut> find_struts(const PolygonalKnot& knot, double cutoff,
                               StrutSearch search = StrutSearch::kGrid, double slack = 0.0);

struct StrutDistance {
  double distance = std::numeric_limits<double>::infinity();
  std::size_t edge_a = 0;
  std::size_t edge_b = 0;
};

// Doubly-critical self distance: smallest critical strut. +inf when no
// non-adjacent edge pair exists (triangles).
StrutDistance min_strut_distance(const PolygonalKnot& knot,
                                 StrutSearch search = StrutSearch::kBruteForce);

// Plain minimum distance over every non-adjacent edge pair, critical or
// not. Bounds how far vertices may move without a strand passage.
double min_nonadjacent_distance(const PolygonalKnot& knot);

struct ThicknessBreakdown {
  double min_rad = std::numeric_limits<double>::infinity();
  double dcsd_half = std::numeric_limits<double>::infinity();
  double thickness = 0.0;
  bool curvature_governs = true;
  std::size_t curvature_vertex = 0;
  std::size_t strut_edge_a = 0;
  std::size_t strut_edge_b = 0;
};

ThicknessBreakdown thickness(const PolygonalKnot& knot,
                             StrutSearch search = StrutSearch::kGrid);

// length / thickness; throws kGeometry on non-positive thickness.
double ropelength(const PolygonalKnot& knot);

// Rescales about the centroid so that thickness is exactly `target`.
PolygonalKnot rescaled_to_thickness(const PolygonalKnot& knot, double target = 1.0);

}  // namespace tightknot
