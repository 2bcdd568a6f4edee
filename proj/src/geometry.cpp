#include "tightknot/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace tightknot {

PolygonalKnot::PolygonalKnot(std::vector<Point3> vertices, std::string label)
    : vertices_(std::move(vertices)), label_(std::move(label)) {
  build_topology({vertices_.size()});
  validate();
}

PolygonalKnot PolygonalKnot::from_components(const std::vector<std::vector<Point3>>& components,
                                             std::string label) {
  PolygonalKnot knot;
  knot.label_ = std::move(label);
  std::vector<std::size_t> sizes;
  for (const auto& c : components) {
    knot.vertices_.insert(knot.vertices_.end(), c.begin(), c.end());
    sizes.push_back(c.size());
  }
  if (sizes.empty()) throw Error(ErrorKind::kInvalidArgument, "knot needs at least one component");
  knot.build_topology(std::move(sizes));
  knot.validate();
  return knot;
}

void PolygonalKnot::build_topology(std::vector<std::size_t> sizes) {
  starts_.assign(1, 0);
  for (auto s : sizes) starts_.push_back(starts_.back() + s);
  const std::size_t n = vertices_.size();
  next_.resize(n);
  prev_.resize(n);
  component_.resize(n);
  for (std::size_t c = 0; c + 1 < starts_.size(); ++c) {
    const std::size_t first = starts_[c];
    const std::size_t last = starts_[c + 1];
    for (std::size_t i = first; i < last; ++i) {
      next_[i] = (i + 1 == last) ? first : i + 1;
      prev_[i] = (i == first) ? last - 1 : i - 1;
      component_[i] = c;
    }
  }
}

void PolygonalKnot::validate() const {
  for (std::size_t c = 0; c + 1 < starts_.size(); ++c) {
    if (starts_[c + 1] - starts_[c] < 3) {
      std::ostringstream msg;
      msg << "component " << c << " has " << (starts_[c + 1] - starts_[c])
          << " vertices; at least 3 are required";
      throw Error(ErrorKind::kInvalidArgument, msg.str());
    }
  }
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (!vertices_[i].allFinite()) {
      throw Error(ErrorKind::kInvalidArgument, "vertex " + std::to_string(i) + " is not finite");
    }
  }
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (vertices_[i] == vertices_[next_[i]]) {
      throw Error(ErrorKind::kInvalidArgument,
                  "edge " + std::to_string(i) + " has zero length");
    }
  }
}

std::vector<std::size_t> PolygonalKnot::component_sizes() const {
  std::vector<std::size_t> sizes;
  for (std::size_t c = 0; c + 1 < starts_.size(); ++c) sizes.push_back(starts_[c + 1] - starts_[c]);
  return sizes;
}

PolygonalKnot PolygonalKnot::component(std::size_t c) const {
  std::vector<Point3> pts(vertices_.begin() + static_cast<std::ptrdiff_t>(starts_[c]),
                          vertices_.begin() + static_cast<std::ptrdiff_t>(starts_[c + 1]));
  return PolygonalKnot(std::move(pts), label_);
}

PolygonalKnot PolygonalKnot::with_vertices(std::vector<Point3> vertices) const {
  if (vertices.size() != vertices_.size()) {
    throw Error(ErrorKind::kInvalidArgument, "vertex count mismatch");
  }
  PolygonalKnot out = *this;
  out.vertices_ = std::move(vertices);
  out.validate();
  return out;
}

PolygonalKnot PolygonalKnot::scaled(double factor) const {
  std::vector<Point3> pts(vertices_.size());
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = vertices_[i] * factor;
  return with_vertices(std::move(pts));
}

PolygonalKnot PolygonalKnot::transformed(const Eigen::Matrix3d& linear, const Point3& offset) const {
  std::vector<Point3> pts(vertices_.size());
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = linear * vertices_[i] + offset;
  return with_vertices(std::move(pts));
}

PolygonalKnot PolygonalKnot::mirrored() const {
  std::vector<Point3> pts(vertices_.begin(), vertices_.end());
  for (auto& p : pts) p.z() = -p.z();
  return with_vertices(std::move(pts));
}

Point3 PolygonalKnot::centroid() const {
  Point3 c = Point3::Zero();
  for (const auto& p : vertices_) c += p;
  return c / static_cast<double>(vertices_.size());
}

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

double point_segment_param(const Point3& p, const Point3& a, const Point3& b) {
  const Point3 d = b - a;
  const double dd = d.squaredNorm();
  if (dd <= 0.0) return 0.0;
  return clamp01((p - a).dot(d) / dd);
}

}  // namespace

double point_segment_distance(const Point3& p, const Point3& a, const Point3& b) {
  const double t = point_segment_param(p, a, b);
  return (a + t * (b - a) - p).norm();
}

SegmentClosest segment_closest(const Point3& a0, const Point3& a1, const Point3& b0,
                               const Point3& b1) {
  const Point3 d1 = a1 - a0;
  const Point3 d2 = b1 - b0;
  const Point3 r = a0 - b0;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double b = d1.dot(d2);
  const double c = d1.dot(r);
  const double f = d2.dot(r);
  const double denom = a * e - b * b;

  if (denom <= 1e-14 * a * e) {
    // Parallel. If the projections overlap every point of the overlap is a
    // minimiser; take its midpoint so the pair sits in both edge interiors.
    if (a > 0.0) {
      const double u0 = (b0 - a0).dot(d1) / a;
      const double u1 = (b1 - a0).dot(d1) / a;
      const double lo = std::max(0.0, std::min(u0, u1));
      const double hi = std::min(1.0, std::max(u0, u1));
      if (lo < hi) {
        const double s = 0.5 * (lo + hi);
        const double t = point_segment_param(a0 + s * d1, b0, b1);
        return {((a0 + s * d1) - (b0 + t * d2)).norm(), s, t};
      }
    }
    // Otherwise the minimum is attained at an endpoint of one of the segments.
    SegmentClosest best;
    best.distance = std::numeric_limits<double>::infinity();
    auto consider = [&](double s, double t) {
      const double dist = ((a0 + s * d1) - (b0 + t * d2)).norm();
      if (dist < best.distance) best = {dist, s, t};
    };
    consider(0.0, point_segment_param(a0, b0, b1));
    consider(1.0, point_segment_param(a1, b0, b1));
    consider(point_segment_param(b0, a0, a1), 0.0);
    consider(point_segment_param(b1, a0, a1), 1.0);
    return best;
  }

  double s = clamp01((b * f - c * e) / denom);
  double t = (b * s + f) / e;
  if (t < 0.0) {
    t = 0.0;
    s = clamp01(-c / a);
  } else if (t > 1.0) {
    t = 1.0;
    s = clamp01((b - c) / a);
  }
  return {((a0 + s * d1) - (b0 + t * d2)).norm(), s, t};
}

double edge_length(const PolygonalKnot& knot, std::size_t edge) {
  return (knot.vertex(knot.next(edge)) - knot.vertex(edge)).norm();
}

double length(const PolygonalKnot& knot) {
  double total = 0.0;
  for (std::size_t i = 0; i < knot.edge_count(); ++i) total += edge_length(knot, i);
  return total;
}

double mean_edge_length(const PolygonalKnot& knot) {
  return length(knot) / static_cast<double>(knot.edge_count());
}

double turning_radius(const PolygonalKnot& knot, std::size_t v) {
  const Point3 in = knot.vertex(v) - knot.vertex(knot.prev(v));
  const Point3 out = knot.vertex(knot.next(v)) - knot.vertex(v);
  const double lin = in.norm();
  const double lout = out.norm();
  // tan(theta/2) = |in x out| / (|in||out| + in.out)
  const double cross = in.cross(out).norm();
  if (cross == 0.0 && in.dot(out) > 0.0) return std::numeric_limits<double>::infinity();
  const double tan_half = cross / (lin * lout + in.dot(out));
  return std::min(lin, lout) / (2.0 * tan_half);
}

CurvatureBound min_radius_of_curvature(const PolygonalKnot& knot) {
  CurvatureBound best;
  for (std::size_t v = 0; v < knot.size(); ++v) {
    const double r = turning_radius(knot, v);
    if (r < best.radius) best = {r, v};
  }
  return best;
}

bool is_critical_pair(const PolygonalKnot& knot, std::size_t i, std::size_t j,
                      const SegmentClosest& cl, double slack) {
  const Point3& a0 = knot.vertex(i);
  const Point3& a1 = knot.vertex(knot.next(i));
  const Point3& b0 = knot.vertex(j);
  const Point3& b1 = knot.vertex(knot.next(j));
  const Point3 p = a0 + cl.s * (a1 - a0);
  const Point3 q = b0 + cl.t * (b1 - b0);

  // At a vertex, sliding onto the neighbouring edge must not bring the
  // point closer to its partner.
  auto vertex_ok = [&](std::size_t vertex, std::size_t toward, const Point3& self,
                       const Point3& other) {
    const Point3 dir = knot.vertex(toward) - knot.vertex(vertex);
    return (other - self).dot(dir) <= slack * (other - self).norm() * dir.norm();
  };
  if (cl.s <= 0.0 && !vertex_ok(i, knot.prev(i), p, q)) return false;
  if (cl.s >= 1.0 && !vertex_ok(knot.next(i), knot.next(knot.next(i)), p, q)) return false;
  if (cl.t <= 0.0 && !vertex_ok(j, knot.prev(j), q, p)) return false;
  if (cl.t >= 1.0 && !vertex_ok(knot.next(j), knot.next(knot.next(j)), q, p)) return false;
  return true;
}

namespace {

// Candidate non-adjacent edge pairs (i < j) whose distance may be <= cell.
// Each edge's bounding box, inflated by cell/2, is rasterised into cubic
// cells of side `cell`; two edges within `cell` of each other share the cell
// containing the midpoint of their closest points.
std::vector<std::pair<std::size_t, std::size_t>> grid_candidates(const PolygonalKnot& knot,
                                                                 double cell) {
  const std::size_t n = knot.edge_count();
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells;
  auto key = [](std::int64_t x, std::int64_t y, std::int64_t z) {
    constexpr std::int64_t kMask = (1 << 21) - 1;
    return (static_cast<std::uint64_t>(x & kMask) << 42) |
           (static_cast<std::uint64_t>(y & kMask) << 21) | static_cast<std::uint64_t>(z & kMask);
  };
  for (std::size_t e = 0; e < n; ++e) {
    const Point3& a = knot.vertex(e);
    const Point3& b = knot.vertex(knot.next(e));
    const Point3 lo = a.cwiseMin(b).array() - 0.5 * cell;
    const Point3 hi = a.cwiseMax(b).array() + 0.5 * cell;
    const auto cx0 = static_cast<std::int64_t>(std::floor(lo.x() / cell));
    const auto cy0 = static_cast<std::int64_t>(std::floor(lo.y() / cell));
    const auto cz0 = static_cast<std::int64_t>(std::floor(lo.z() / cell));
    const auto cx1 = static_cast<std::int64_t>(std::floor(hi.x() / cell));
    const auto cy1 = static_cast<std::int64_t>(std::floor(hi.y() / cell));
    const auto cz1 = static_cast<std::int64_t>(std::floor(hi.z() / cell));
    for (auto x = cx0; x <= cx1; ++x)
      for (auto y = cy0; y <= cy1; ++y)
        for (auto z = cz0; z <= cz1; ++z) cells[key(x, y, z)].push_back(e);
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& [k, edges] : cells) {
    for (std::size_t u = 0; u < edges.size(); ++u) {
      for (std::size_t w = u + 1; w < edges.size(); ++w) {
        const std::size_t i = std::min(edges[u], edges[w]);
        const std::size_t j = std::max(edges[u], edges[w]);
        if (!knot.edges_adjacent(i, j)) pairs.emplace_back(i, j);
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

// Cells the rasteriser would touch; long edges against a small cutoff cost
// (length/cell)^3 each.
double grid_cell_count(const PolygonalKnot& knot, double cell) {
  double total = 0.0;
  for (std::size_t e = 0; e < knot.edge_count(); ++e) {
    const Point3 ext = (knot.vertex(e) - knot.vertex(knot.next(e))).cwiseAbs();
    total += (ext.array() / cell + 2.0).prod();
  }
  return total;
}

Strut make_strut(const PolygonalKnot& knot, std::size_t i, std::size_t j, double slack,
                 bool& critical) {
  const SegmentClosest cl = segment_closest(knot.vertex(i), knot.vertex(knot.next(i)),
                                            knot.vertex(j), knot.vertex(knot.next(j)));
  critical = is_critical_pair(knot, i, j, cl, slack);
  return {i, j, cl.s, cl.t, cl.distance};
}

double bounding_diagonal(const PolygonalKnot& knot) {
  Point3 lo = knot.vertex(0);
  Point3 hi = knot.vertex(0);
  for (const auto& p : knot.vertices()) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

}  // namespace

std::vector<Strut> find_struts(const PolygonalKnot& knot, double cutoff, StrutSearch search,
                               double slack) {
  std::vector<Strut> out;
  const std::size_t n = knot.edge_count();
  auto visit = [&](std::size_t i, std::size_t j) {
    bool critical = false;
    const Strut s = make_strut(knot, i, j, slack, critical);
    if (critical && s.distance <= cutoff) out.push_back(s);
  };
  // Small cutoffs against long edges need more cells than brute force has pairs.
  const bool use_grid = search == StrutSearch::kGrid && cutoff > 0.0 &&
                        grid_cell_count(knot, cutoff) < 0.5 * static_cast<double>(n) * static_cast<double>(n);
  if (use_grid) {
    for (const auto& [i, j] : grid_candidates(knot, cutoff)) visit(i, j);
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (!knot.edges_adjacent(i, j)) visit(i, j);
  }
  return out;
}

StrutDistance min_strut_distance(const PolygonalKnot& knot, StrutSearch search) {
  StrutDistance best;
  auto take_min = [&](const std::vector<Strut>& struts) {
    for (const auto& s : struts) {
      if (s.distance < best.distance) best = {s.distance, s.edge_a, s.edge_b};
    }
  };
  if (search == StrutSearch::kBruteForce) {
    take_min(find_struts(knot, std::numeric_limits<double>::infinity(), StrutSearch::kBruteForce));
    return best;
  }
  // Grow the cell until some critical strut falls inside it; every strut
  // shorter than the cutoff is enumerated, so the minimum is exact.
  const double diag = bounding_diagonal(knot);
  double cutoff = 2.0 * mean_edge_length(knot);
  while (true) {
    if (cutoff >= diag) {
      take_min(find_struts(knot, std::numeric_limits<double>::infinity(),
                           StrutSearch::kBruteForce));
      return best;
    }
    const auto struts = find_struts(knot, cutoff, StrutSearch::kGrid);
    if (!struts.empty()) {
      take_min(struts);
      return best;
    }
    cutoff *= 2.0;
  }
}

double min_nonadjacent_distance(const PolygonalKnot& knot) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = knot.edge_count();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (knot.edges_adjacent(i, j)) continue;
      const double d = segment_closest(knot.vertex(i), knot.vertex(knot.next(i)), knot.vertex(j),
                                       knot.vertex(knot.next(j)))
                           .distance;
      best = std::min(best, d);
    }
  }
  return best;
}

ThicknessBreakdown thickness(const PolygonalKnot& knot, StrutSearch search) {
  ThicknessBreakdown out;
  const CurvatureBound curv = min_radius_of_curvature(knot);
  const StrutDistance strut = min_strut_distance(knot, search);
  out.min_rad = curv.radius;
  out.curvature_vertex = curv.vertex;
  out.dcsd_half = 0.5 * strut.distance;
  out.strut_edge_a = strut.edge_a;
  out.strut_edge_b = strut.edge_b;
  out.curvature_governs = out.min_rad <= out.dcsd_half;
  out.thickness = std::min(out.min_rad, out.dcsd_half);
  return out;
}

double ropelength(const PolygonalKnot& knot) {
  const double t = thickness(knot).thickness;
  if (!(t > 0.0)) throw Error(ErrorKind::kGeometry, "configuration is self-intersecting (thickness <= 0)");
  return length(knot) / t;
}

PolygonalKnot rescaled_to_thickness(const PolygonalKnot& knot, double target) {
  const double t = thickness(knot).thickness;
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw Error(ErrorKind::kGeometry, "cannot rescale: thickness is not positive and finite");
  }
  const double factor = target / t;
  const Point3 c = knot.centroid();
  std::vector<Point3> pts(knot.size());
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = c + factor * (knot.vertex(i) - c);
  return knot.with_vertices(std::move(pts));
}

}  // namespace tightknot
