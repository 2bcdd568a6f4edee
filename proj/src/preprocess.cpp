#include <algorithm>
#include <cmath>

#include "tightknot/tightener.hpp"

namespace tightknot {

void PreprocessConfig::validate() const {
  if (coulomb_steps < 0) throw Error(ErrorKind::kInvalidArgument, "coulomb_steps must be >= 0");
  if (!(coulomb_strength >= 0.0) || !(tangential_strength >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "force strengths must be >= 0");
  }
  if (!(damping > 0.0 && damping <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "damping must lie in (0, 1]");
  }
}

PreprocessResult preprocess(const PolygonalKnot& input, const PreprocessConfig& config) {
  config.validate();
  PreprocessResult out{input, {}};
  if (config.coulomb_steps == 0) return out;

  // Energy coulomb * sum 1/r + tangential * length, with lengths measured in
  // the input's mean edge length so the relaxed size is set by the two
  // strengths rather than by the input scale.
  PolygonalKnot knot = input;
  const std::size_t n = knot.size();
  const double unit = mean_edge_length(input);
  std::vector<Point3> force(n);
  for (long step = 0; step < config.coulomb_steps; ++step) {
    for (std::size_t i = 0; i < n; ++i) {
      const Point3& p = knot.vertex(i);
      Point3 repel = Point3::Zero();
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || j == knot.next(i) || j == knot.prev(i)) continue;
        const Point3 r = (p - knot.vertex(j)) / unit;
        const double d = r.norm();
        repel += r / (d * d * d);
      }
      const Point3 to_next = (knot.vertex(knot.next(i)) - p).normalized();
      const Point3 to_prev = (knot.vertex(knot.prev(i)) - p).normalized();
      force[i] = config.coulomb_strength * repel + config.tangential_strength * (to_next + to_prev);
    }

    double fmax = 0.0;
    for (const auto& f : force) fmax = std::max(fmax, f.norm());
    if (fmax == 0.0) break;
    double scale = config.damping * unit;
    const double cap = 0.25 * min_nonadjacent_distance(knot);
    if (scale * fmax > cap) {
      scale = cap / fmax;
      ++out.report.capped_steps;
    }
    if (!(scale * fmax > 1e-12 * unit)) {
      out.report.starved = true;
      break;
    }
    std::vector<Point3> v(knot.vertices().begin(), knot.vertices().end());
    for (std::size_t i = 0; i < n; ++i) v[i] += scale * force[i];
    knot = knot.with_vertices(std::move(v));
    ++out.report.steps;
  }

  const Point3 c = knot.centroid();
  std::vector<Point3> v(knot.vertices().begin(), knot.vertices().end());
  for (auto& p : v) p -= c;
  out.knot = knot.with_vertices(std::move(v));
  return out;
}

namespace {

// Arclength walker over one closed component.
struct Walker {
  std::vector<Point3> pts;

  // Position just past (edge, u) on the curve at Euclidean distance `chord`
  // from `from`; advances edge/u and accumulates the number of edges passed.
  Point3 advance(const Point3& from, double chord, std::size_t& edge, double& u,
                 std::size_t& laps_edges) const {
    const std::size_t m = pts.size();
    for (std::size_t guard = 0; guard < 2 * m + 2; ++guard) {
      const Point3& a = pts[edge % m];
      const Point3& b = pts[(edge + 1) % m];
      const Point3 e = b - a;
      const Point3 w = a - from;
      const double qa = e.squaredNorm();
      const double qb = 2.0 * w.dot(e);
      const double qc = w.squaredNorm() - chord * chord;
      const double disc = qb * qb - 4.0 * qa * qc;
      if (disc >= 0.0) {
        const double root = (-qb + std::sqrt(disc)) / (2.0 * qa);  // exit of the sphere
        if (root >= u && root <= 1.0) {
          u = root;
          return a + root * e;
        }
      }
      ++edge;
      ++laps_edges;
      u = 0.0;
    }
    return from;
  }
};

std::vector<Point3> equal_chords(const std::vector<Point3>& pts, std::size_t count) {
  const std::size_t m = pts.size();
  double total = 0.0;
  std::vector<double> cum(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    cum[i + 1] = cum[i] + (pts[(i + 1) % m] - pts[i]).norm();
  }
  total = cum[m];
  Walker walker{pts};

  // Arclength covered by `count` chords of the given length.
  auto travel = [&](double chord, std::vector<Point3>* out) {
    std::size_t edge = 0;
    std::size_t passed = 0;
    double u = 0.0;
    Point3 p = pts[0];
    if (out) out->assign(1, p);
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t before = passed;
      p = walker.advance(p, chord, edge, u, passed);
      if (passed - before > m) return 2.0 * total;  // sphere never exited
      if (out && k + 1 < count) out->push_back(p);
    }
    const std::size_t e = edge % m;
    return (edge / m) * total + cum[e] + u * (cum[e + 1] - cum[e]);
  };

  double lo = 0.0;
  double hi = total / static_cast<double>(count);
  while (travel(hi, nullptr) < total) hi *= 1.5;
  for (int iter = 0; iter < 200 && hi - lo > 1e-16 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (travel(mid, nullptr) < total) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  std::vector<Point3> out;
  travel(0.5 * (lo + hi), &out);
  return out;
}

}  // namespace

PolygonalKnot equilateralize(const PolygonalKnot& knot, std::size_t target_count) {
  if (target_count < 3) throw Error(ErrorKind::kInvalidArgument, "target_count must be >= 3");
  std::vector<std::vector<Point3>> comps;
  for (std::size_t c = 0; c < knot.component_count(); ++c) {
    const auto [first, last] = knot.component_range(c);
    std::vector<Point3> pts(knot.vertices().begin() + static_cast<std::ptrdiff_t>(first),
                            knot.vertices().begin() + static_cast<std::ptrdiff_t>(last));
    comps.push_back(equal_chords(pts, target_count));
  }
  return PolygonalKnot::from_components(comps, knot.label());
}

}  // namespace tightknot
