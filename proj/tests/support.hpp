#pragma once

// Shared fixtures and independent oracles for the test suites.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Geometry>

#include "tightknot/geometry.hpp"
#include "tightknot/io.hpp"
#include "tightknot/records.hpp"

namespace tktest {

using tightknot::Point3;
using tightknot::PolygonalKnot;

inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  q.normalize();
  return q.toRotationMatrix();
}

inline Point3 random_point(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng)};
}

// (p, q) torus knot on a torus of radii R > r, n vertices.
inline PolygonalKnot torus_knot(int p, int q, std::size_t n, double R = 2.0, double r = 1.0) {
  std::vector<Point3> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    const double rho = R + r * std::cos(q * t);
    v[i] = {rho * std::cos(p * t), rho * std::sin(p * t), r * std::sin(q * t)};
  }
  return PolygonalKnot(std::move(v));
}

// Random embedded knot for property tests: a trefoil, a (2,5) torus knot or
// a wobbly circle, randomly rotated, scaled and jittered well below its
// thickness.
inline PolygonalKnot random_knot(std::mt19937_64& rng, std::size_t n_min = 24,
                                 std::size_t n_max = 48) {
  std::uniform_int_distribution<std::size_t> nd(n_min, n_max);
  std::uniform_int_distribution<int> kind(0, 2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = nd(rng);
  PolygonalKnot base;
  switch (kind(rng)) {
    case 0: base = tightknot::sample_fourier(tightknot::trefoil_spec(), n); break;
    case 1: base = torus_knot(2, 5, std::max<std::size_t>(n, 40), 2.0, 0.8); break;
    default: {
      std::vector<Point3> v(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        v[i] = {std::cos(t), std::sin(t), 0.3 * std::sin(3 * t)};
      }
      base = PolygonalKnot(std::move(v));
    }
  }
  const double jitter = 0.02 * tightknot::thickness(base).thickness;
  std::vector<Point3> v(base.vertices().begin(), base.vertices().end());
  for (auto& p : v) p += random_point(rng, jitter);
  const double scale = 0.5 + 2.0 * u(rng);
  return PolygonalKnot(std::move(v)).transformed(scale * random_rotation(rng), random_point(rng, 3.0));
}

// Distance between segments by nested golden-section search; the distance
// is convex in (s, t), so each one-dimensional minimum is unimodal.
inline double golden_min(const auto& f, double lo = 0.0, double hi = 1.0) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 90; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return std::min({f(lo), f(hi), f(0.5 * (a + b))});
}

inline double segment_distance_oracle(const Point3& a0, const Point3& a1, const Point3& b0,
                                      const Point3& b1) {
  auto inner = [&](double s) {
    const Point3 p = a0 + s * (a1 - a0);
    return golden_min([&](double t) { return (p - (b0 + t * (b1 - b0))).norm(); });
  };
  return golden_min(inner);
}

// Record with every optional randomly present, awkward text included.
inline tightknot::InvariantRecord random_record(std::mt19937_64& rng, int id) {
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::bernoulli_distribution coin(0.7);
  const char* texts[] = {"", "plain", "has,comma", "has \"quote\"", "multi\nline", "#hash", " padded "};
  auto text = [&] { return std::string(texts[std::uniform_int_distribution<int>(0, 6)(rng)]); };
  auto real = [&]() -> std::optional<double> {
    if (!coin(rng)) return std::nullopt;
    return u(rng) * std::pow(10.0, std::uniform_int_distribution<int>(-12, 12)(rng));
  };
  tightknot::InvariantRecord r;
  r.label = "k" + std::to_string(id) + text();
  if (coin(rng)) r.crossing_number = std::uniform_int_distribution<int>(0, 16)(rng);
  if (coin(rng)) r.alternating = coin(rng);
  if (coin(rng)) r.vertex_count = std::uniform_int_distribution<long>(3, 100000)(rng);
  r.ropelength = real();
  r.writhe = real();
  r.acn = real();
  r.residual = real();
  r.termination = text();
  r.status = text();
  r.error = text();
  r.determinant_before = text();
  r.determinant_after = text();
  r.config_hash = text();
  r.hyperbolic_volume = real();
  r.alexander_at_minus1 = real();
  r.rasmussen_s = real();
  r.tau = real();
  return r;
}

}  // namespace tktest
