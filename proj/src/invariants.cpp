#include "tightknot/invariants.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace tightknot {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;
constexpr int kGaussOrder = 10;

struct GaussLegendre {
  std::array<double, kGaussOrder> nodes{};    // on [0, 1]
  std::array<double, kGaussOrder> weights{};  // sum to 1
};

// Newton iteration on P_n for the nodes on [-1, 1], mapped to [0, 1].
GaussLegendre make_gauss_legendre() {
  GaussLegendre gl;
  constexpr int n = kGaussOrder;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    gl.nodes[i] = 0.5 * (1.0 - x);
    gl.weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);  // 2/((1-x^2)P'^2), halved for [0,1]
  }
  return gl;
}

const GaussLegendre& gauss_legendre() {
  static const GaussLegendre gl = make_gauss_legendre();
  return gl;
}

struct PairIntegrand {
  Point3 a0, da, b0, db, cross;
  bool absolute;

  double operator()(double s, double t) const {
    const Point3 r = (a0 + s * da) - (b0 + t * db);
    const double d = r.norm();
    const double v = cross.dot(r) / (d * d * d);
    return absolute ? std::abs(v) : v;
  }
};

double tensor_rule(const PairIntegrand& f, double s0, double s1, double t0, double t1) {
  const auto& gl = gauss_legendre();
  double sum = 0.0;
  for (int i = 0; i < kGaussOrder; ++i) {
    const double s = s0 + (s1 - s0) * gl.nodes[i];
    double row = 0.0;
    for (int j = 0; j < kGaussOrder; ++j) row += gl.weights[j] * f(s, t0 + (t1 - t0) * gl.nodes[j]);
    sum += gl.weights[i] * row;
  }
  return sum * (s1 - s0) * (t1 - t0);
}

double adaptive(const PairIntegrand& f, double s0, double s1, double t0, double t1, double whole,
                double tol, int depth) {
  const double sm = 0.5 * (s0 + s1);
  const double tm = 0.5 * (t0 + t1);
  const double q00 = tensor_rule(f, s0, sm, t0, tm);
  const double q01 = tensor_rule(f, s0, sm, tm, t1);
  const double q10 = tensor_rule(f, sm, s1, t0, tm);
  const double q11 = tensor_rule(f, sm, s1, tm, t1);
  const double parts = q00 + q01 + q10 + q11;
  if (depth >= 24 || std::abs(parts - whole) <= tol) return parts;
  const double sub = 0.25 * tol;
  return adaptive(f, s0, sm, t0, tm, q00, sub, depth + 1) +
         adaptive(f, s0, sm, tm, t1, q01, sub, depth + 1) +
         adaptive(f, sm, s1, t0, tm, q10, sub, depth + 1) +
         adaptive(f, sm, s1, tm, t1, q11, sub, depth + 1);
}

}  // namespace

double gauss_pair_quadrature(const Point3& a0, const Point3& a1, const Point3& b0,
                             const Point3& b1, bool absolute, double tolerance) {
  const PairIntegrand f{a0, a1 - a0, b0, b1 - b0, (a1 - a0).cross(b1 - b0), absolute};
  const double whole = tensor_rule(f, 0.0, 1.0, 0.0, 1.0);
  return adaptive(f, 0.0, 1.0, 0.0, 1.0, whole, tolerance * kFourPi, 0) / kFourPi;
}

double gauss_pair_closed_form(const Point3& p1, const Point3& p2, const Point3& p3,
                              const Point3& p4) {
  // b(t) - a(s) sweeps the parallelogram A B C D; the integral is its signed
  // solid angle seen from the origin, split into two triangles. The atan2
  // form stays accurate when the segments are (nearly) coplanar, where the
  // arcsine of unit-normal products loses half the digits.
  const Point3 A = p3 - p1;
  const Point3 B = p4 - p1;
  const Point3 C = p4 - p2;
  const Point3 D = p3 - p2;
  const double a = A.norm(), b = B.norm(), c = C.norm(), d = D.norm();
  if (a == 0.0 || b == 0.0 || c == 0.0 || d == 0.0) return gauss_pair_quadrature(p1, p2, p3, p4);
  auto triangle = [](const Point3& x, const Point3& y, const Point3& z, double lx, double ly, double lz) {
    const double num = x.dot(y.cross(z));
    const double den = lx * ly * lz + x.dot(y) * lz + x.dot(z) * ly + y.dot(z) * lx;
    return 2.0 * std::atan2(num, den);
  };
  const double omega = triangle(A, B, C, a, b, c) + triangle(A, C, D, a, c, d);
  return -omega / kFourPi;
}

std::vector<GaussPairContribution> pair_contributions(const PolygonalKnot& knot) {
  const std::size_t n = knot.edge_count();
  const double near_limit = 1e-7 * mean_edge_length(knot);
  std::vector<GaussPairContribution> out;
  out.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    const Point3& a0 = knot.vertex(i);
    const Point3& a1 = knot.vertex(knot.next(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      if (knot.edges_adjacent(i, j)) continue;
      const Point3& b0 = knot.vertex(j);
      const Point3& b1 = knot.vertex(knot.next(j));
      GaussPairContribution c{i, j, 0.0, 0.0};
      if (segment_closest(a0, a1, b0, b1).distance < near_limit) {
        c.writhe_term = gauss_pair_quadrature(a0, a1, b0, b1, false);
        c.acn_term = gauss_pair_quadrature(a0, a1, b0, b1, true);
      } else {
        c.writhe_term = gauss_pair_closed_form(a0, a1, b0, b1);
        c.acn_term = std::abs(c.writhe_term);
      }
      out.push_back(c);
    }
  }
  return out;
}

WritheAcn writhe_and_acn(const PolygonalKnot& knot) {
  WritheAcn out;
  for (const auto& c : pair_contributions(knot)) {
    out.writhe += c.writhe_term;
    out.acn += c.acn_term;
  }
  out.writhe *= 2.0;
  out.acn *= 2.0;
  return out;
}

double space_writhe(const PolygonalKnot& knot) { return writhe_and_acn(knot).writhe; }

double average_crossing_number(const PolygonalKnot& knot) { return writhe_and_acn(knot).acn; }

std::pair<double, double> writhe_mirror_check(const PolygonalKnot& knot) {
  return {space_writhe(knot), space_writhe(knot.mirrored())};
}

}  // namespace tightknot
