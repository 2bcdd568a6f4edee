#include "tightknot/topology.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>

namespace tightknot {

namespace {

using Vec2 = Eigen::Vector2d;

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double point_segment_distance_2d(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (a + t * ab - p).norm();
}

[[noreturn]] void not_generic(const std::string& why) {
  throw Error(ErrorKind::kTopology, "projection not generic: " + why);
}

}  // namespace

int Diagram::writhe() const {
  int w = 0;
  for (const auto& c : crossings) w += c.sign;
  return w;
}

Diagram project_to_diagram(const PolygonalKnot& knot, const Point3& direction) {
  if (knot.component_count() != 1) {
    throw Error(ErrorKind::kInvalidArgument, "diagrams are built for single-component knots");
  }
  const double dn = direction.norm();
  if (!(dn > 0.0) || !std::isfinite(dn)) {
    throw Error(ErrorKind::kInvalidArgument, "projection direction must be a non-zero vector");
  }
  Diagram dia;
  dia.direction = direction / dn;
  const Point3& d = dia.direction;
  const Point3 helper = std::abs(d.z()) < 0.9 ? Point3::UnitZ() : Point3::UnitX();
  const Point3 e1 = helper.cross(d).normalized();
  const Point3 e2 = d.cross(e1);  // e1 x e2 = d

  const std::size_t n = knot.size();
  std::vector<Vec2> p(n);
  std::vector<double> h(n);
  Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity());
  Vec2 hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = {knot.vertex(i).dot(e1), knot.vertex(i).dot(e2)};
    h[i] = knot.vertex(i).dot(d);
    lo = lo.cwiseMin(p[i]);
    hi = hi.cwiseMax(p[i]);
  }
  const double tol = 1e-9 * std::max((hi - lo).norm(), 1e-300);

  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = p[knot.next(i)] - p[i];
    if (a.norm() <= tol) not_generic("edge projects to a point");
    const Vec2 b = p[knot.next(knot.next(i))] - p[knot.next(i)];
    if (std::abs(cross2(a, b)) <= tol * (a.norm() + b.norm()) && a.dot(b) < 0.0) {
      not_generic("consecutive edges fold onto each other");
    }
  }

  struct Hit {
    std::size_t edge;
    double param;
    std::size_t crossing;
    bool over;
  };
  std::vector<Hit> hits;
  std::vector<Vec2> where;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a0 = p[i];
    const Vec2& a1 = p[knot.next(i)];
    for (std::size_t j = i + 1; j < n; ++j) {
      if (knot.edges_adjacent(i, j)) continue;
      const Vec2& b0 = p[j];
      const Vec2& b1 = p[knot.next(j)];
      if (point_segment_distance_2d(a0, b0, b1) <= tol || point_segment_distance_2d(a1, b0, b1) <= tol ||
          point_segment_distance_2d(b0, a0, a1) <= tol || point_segment_distance_2d(b1, a0, a1) <= tol) {
        not_generic("a vertex projects onto another edge");
      }
      const Vec2 r = a1 - a0;
      const Vec2 s = b1 - b0;
      const double denom = cross2(r, s);
      if (denom == 0.0) continue;
      const double t = cross2(b0 - a0, s) / denom;
      const double u = cross2(b0 - a0, r) / denom;
      if (!(t > 0.0 && t < 1.0 && u > 0.0 && u < 1.0)) continue;
      const double ha = h[i] + t * (h[knot.next(i)] - h[i]);
      const double hb = h[j] + u * (h[knot.next(j)] - h[j]);
      if (std::abs(ha - hb) <= tol) not_generic("strands meet in space");
      const bool a_over = ha > hb;
      const Vec2 over_dir = a_over ? r : s;
      const Vec2 under_dir = a_over ? s : r;
      Crossing c;
      c.over_edge = a_over ? i : j;
      c.under_edge = a_over ? j : i;
      c.over_param = a_over ? t : u;
      c.under_param = a_over ? u : t;
      c.sign = cross2(over_dir, under_dir) > 0.0 ? 1 : -1;
      const std::size_t id = dia.crossings.size();
      dia.crossings.push_back(c);
      where.push_back(a0 + t * r);
      hits.push_back({i, t, id, a_over});
      hits.push_back({j, u, id, !a_over});
    }
  }
  for (std::size_t a = 0; a < where.size(); ++a) {
    for (std::size_t b = a + 1; b < where.size(); ++b) {
      if ((where[a] - where[b]).norm() <= tol) not_generic("coincident crossings");
    }
  }

  std::sort(hits.begin(), hits.end(), [](const Hit& x, const Hit& y) {
    return x.edge != y.edge ? x.edge < y.edge : x.param < y.param;
  });
  // Renumber crossings by first visit so the Gauss code reads 1, 2, 3, ...
  std::vector<std::size_t> order(dia.crossings.size(), SIZE_MAX);
  std::vector<Crossing> renumbered;
  for (const auto& hit : hits) {
    if (order[hit.crossing] == SIZE_MAX) {
      order[hit.crossing] = renumbered.size();
      renumbered.push_back(dia.crossings[hit.crossing]);
    }
    dia.strand_order.push_back({order[hit.crossing], hit.over});
  }
  dia.crossings = std::move(renumbered);
  return dia;
}

std::vector<Point3> sphere_directions(std::size_t count, std::uint64_t seed) {
  // R2 sequence (plastic-number increments) mapped by equal-area projection.
  constexpr double kPlastic = 1.32471795724474602596;
  constexpr double a1 = 1.0 / kPlastic;
  constexpr double a2 = 1.0 / (kPlastic * kPlastic);
  const double offset = 0.5 + static_cast<double>(seed % 1000003) * 0.6180339887498949;
  std::vector<Point3> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double kk = static_cast<double>(k + 1);
    const double u = offset + kk * a1 - std::floor(offset + kk * a1);
    const double v = 0.5 + kk * a2 - std::floor(0.5 + kk * a2);
    const double z = 1.0 - 2.0 * u;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = 2.0 * std::numbers::pi * v;
    out.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return out;
}

Diagram project_generic(const PolygonalKnot& knot, const Point3& preferred, std::uint64_t seed,
                        int attempts) {
  if (attempts < 1) attempts = 1;
  const auto dirs = sphere_directions(static_cast<std::size_t>(attempts - 1), seed);
  std::string last;
  for (int k = 0; k < attempts; ++k) {
    try {
      return project_to_diagram(knot, k == 0 ? preferred : dirs[k - 1]);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kTopology) throw;
      last = e.what();
    }
  }
  throw Error(ErrorKind::kTopology, "no generic projection after " + std::to_string(attempts) +
                                        " directions (" + last + ")");
}

std::string gauss_code(const Diagram& diagram) {
  std::ostringstream s;
  bool first = true;
  for (const auto& v : diagram.strand_order) {
    if (!first) s << ' ';
    first = false;
    s << (v.over ? 'O' : 'U') << v.crossing + 1 << (diagram.crossings[v.crossing].sign > 0 ? '+' : '-');
  }
  return s.str();
}

BigInt bareiss_determinant(std::vector<std::vector<BigInt>> m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  BigInt prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t r = k + 1;
      while (r < n && m[r][k] == 0) ++r;
      if (r == n) return 0;
      std::swap(m[k], m[r]);  // sign is dropped
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
      }
    }
    prev = m[k][k];
  }
  const BigInt& det = m[n - 1][n - 1];
  return det < 0 ? BigInt(-det) : det;
}

DeterminantResult determinant(const Diagram& dia) {
  DeterminantResult out;
  out.projection_direction = dia.direction;
  out.crossing_count = dia.crossings.size();
  const std::size_t c = dia.crossings.size();
  if (c == 0) return out;
  if (dia.strand_order.size() != 2 * c) {
    throw Error(ErrorKind::kTopology, "inconsistent diagram: visit count is not twice the crossings");
  }

  // Four ports per crossing: 0 over-in, 1 over-out, 2 under-in, 3 under-out.
  std::vector<std::array<int, 4>> ccw(c);     // ports sorted counter-clockwise
  std::vector<std::array<int, 4>> slot_of(c);  // inverse of ccw
  {
    std::vector<std::array<int, 2>> seen(c, {0, 0});
    for (const auto& v : dia.strand_order) {
      if (v.crossing >= c) throw Error(ErrorKind::kTopology, "inconsistent diagram: bad crossing id");
      ++seen[v.crossing][v.over ? 0 : 1];
    }
    for (const auto& s : seen) {
      if (s[0] != 1 || s[1] != 1) {
        throw Error(ErrorKind::kTopology, "inconsistent diagram: crossing not visited once over and once under");
      }
    }
  }
  // Only the relative arrangement matters: with the over strand along +x,
  // the under strand runs along +y for a positive crossing and -y otherwise.
  for (std::size_t x = 0; x < c; ++x) {
    const bool positive = dia.crossings[x].sign > 0;
    // Angles: over-out 0, over-in pi, under-out +-pi/2, under-in -+pi/2.
    if (positive) {
      ccw[x] = {1, 3, 0, 2};  // 0, pi/2, pi, 3pi/2
    } else {
      ccw[x] = {1, 2, 0, 3};
    }
    for (int k = 0; k < 4; ++k) slot_of[x][ccw[x][k]] = k;
  }

  // Arc endpoints: leaving visit k through its out-port, entering visit k+1.
  const std::size_t visits = dia.strand_order.size();
  // partner[(x*4 + slot)] = (y*4 + slot') at the other end of the arc.
  std::vector<std::size_t> partner(4 * c);
  for (std::size_t k = 0; k < visits; ++k) {
    const auto& a = dia.strand_order[k];
    const auto& b = dia.strand_order[(k + 1) % visits];
    const std::size_t from = 4 * a.crossing + slot_of[a.crossing][a.over ? 1 : 3];
    const std::size_t to = 4 * b.crossing + slot_of[b.crossing][b.over ? 0 : 2];
    partner[from] = to;
    partner[to] = from;
  }

  // Face tracing: arriving at slot q, leave through the next clockwise slot;
  // the corner between them (corner q-1, spanning slots q-1 .. q) is on the
  // face. Departures are indexed by crossing*4 + slot.
  std::vector<std::size_t> face_of_corner(4 * c, SIZE_MAX);
  std::vector<std::size_t> face_of_departure(4 * c, SIZE_MAX);
  std::size_t faces = 0;
  for (std::size_t start = 0; start < 4 * c; ++start) {
    if (face_of_departure[start] != SIZE_MAX) continue;
    std::size_t dep = start;
    while (face_of_departure[dep] == SIZE_MAX) {
      face_of_departure[dep] = faces;
      const std::size_t arrive = partner[dep];
      const std::size_t y = arrive / 4;
      const std::size_t q = arrive % 4;
      const std::size_t corner = 4 * y + (q + 3) % 4;
      face_of_corner[corner] = faces;
      dep = corner;  // departure slot q-1 has the same index as corner q-1
    }
    if (dep != start) throw Error(ErrorKind::kTopology, "inconsistent diagram: open face");
    ++faces;
  }
  if (faces != c + 2) {
    throw Error(ErrorKind::kTopology, "inconsistent diagram: Euler characteristic mismatch");
  }

  // Checkerboard colouring: the two faces on either side of an arc differ.
  std::vector<std::vector<std::size_t>> adj(faces);
  for (std::size_t dep = 0; dep < 4 * c; ++dep) {
    const std::size_t f1 = face_of_departure[dep];
    const std::size_t f2 = face_of_departure[partner[dep]];
    adj[f1].push_back(f2);
    adj[f2].push_back(f1);
  }
  std::vector<int> colour(faces, -1);
  colour[0] = 0;
  std::queue<std::size_t> bfs;
  bfs.push(0);
  while (!bfs.empty()) {
    const std::size_t f = bfs.front();
    bfs.pop();
    for (std::size_t g : adj[f]) {
      if (colour[g] < 0) {
        colour[g] = 1 - colour[f];
        bfs.push(g);
      } else if (colour[g] == colour[f]) {
        throw Error(ErrorKind::kTopology, "inconsistent diagram: not two-colourable");
      }
    }
  }

  // Goeritz matrix on the colour-0 faces.
  std::vector<std::size_t> white_index(faces, SIZE_MAX);
  std::size_t whites = 0;
  for (std::size_t f = 0; f < faces; ++f) {
    if (colour[f] == 0) white_index[f] = whites++;
  }
  std::vector<std::vector<BigInt>> g(whites, std::vector<BigInt>(whites, 0));
  for (std::size_t x = 0; x < c; ++x) {
    for (int k = 0; k < 2; ++k) {
      const std::size_t f = face_of_corner[4 * x + k];
      if (colour[f] != 0) continue;
      const std::size_t f2 = face_of_corner[4 * x + k + 2];
      // Corner k spans slots k .. k+1 counter-clockwise; slot k is its
      // clockwise side.
      const int port = ccw[x][k];
      const int eta = (port == 0 || port == 1) ? 1 : -1;
      const std::size_t i = white_index[f];
      const std::size_t j = white_index[f2];
      if (i != j) {
        g[i][j] -= eta;
        g[j][i] -= eta;
        g[i][i] += eta;
        g[j][j] += eta;
      }
      break;
    }
  }
  if (whites <= 1) return out;
  std::vector<std::vector<BigInt>> reduced(whites - 1, std::vector<BigInt>(whites - 1));
  for (std::size_t i = 1; i < whites; ++i) {
    for (std::size_t j = 1; j < whites; ++j) reduced[i - 1][j - 1] = g[i][j];
  }
  out.determinant = bareiss_determinant(std::move(reduced));
  return out;
}

DeterminantResult knot_determinant(const PolygonalKnot& knot, std::uint64_t seed) {
  return determinant(project_generic(knot, Point3(0.3, 0.2, 0.93), seed));
}

TopologyCheck verify_topology(const PolygonalKnot& before, const PolygonalKnot& after,
                              std::uint64_t seed) {
  TopologyCheck out;
  out.before = knot_determinant(before, seed);
  out.after = knot_determinant(after, seed);
  out.same = out.before.determinant == out.after.determinant;
  return out;
}

}  // namespace tightknot
