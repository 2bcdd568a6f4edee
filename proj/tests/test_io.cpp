#include <cmath>
#include <cstring>
#include <numbers>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "support.hpp"
#include "tightknot/invariants.hpp"
#include "tightknot/io.hpp"
#include "tightknot/topology.hpp"

using namespace tightknot;

namespace {

std::string parse_error(std::string_view text) {
  try {
    parse_coordinates(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
    return e.what();
  }
  return "";
}

// Gauss linking integral between two closed polygons, pair by pair.
double linking_number(const PolygonalKnot& a, const PolygonalKnot& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      sum += gauss_pair_closed_form(a.vertex(i), a.vertex(a.next(i)), b.vertex(j), b.vertex(b.next(j)));
  return sum;
}

}  // namespace

TEST(Coordinates, PlainTriangle) {
  const auto f = parse_coordinates("0 0 0\n1 0 0\n0 1 0\n");
  ASSERT_EQ(f.components.size(), 1u);
  ASSERT_EQ(f.components[0].size(), 3u);
  EXPECT_EQ(f.components[0][1], Point3(1, 0, 0));
  EXPECT_EQ(f.to_knot().size(), 3u);
}

TEST(Coordinates, CommentsLabelsAndComponents) {
  const auto f = parse_coordinates(
      "# label: pair\n"
      "# anything else\n"
      "0 0 0\n1 0 0\n0 1 0\n"
      "\n\n"
      "5 5 5\n6,5,5\n5 6 5\n5 5 6\n");
  EXPECT_EQ(f.label, "pair");
  ASSERT_EQ(f.components.size(), 2u);
  EXPECT_EQ(f.components[1].size(), 4u);
  EXPECT_EQ(f.components[1][1], Point3(6, 5, 5));
  EXPECT_EQ(f.vertex_count(), 7u);
  EXPECT_EQ(f.to_knot().component_count(), 2u);
}

TEST(Coordinates, ErrorsCarryLineNumbers) {
  EXPECT_NE(parse_error("0 0 0\n1 0 0\n1 2\n0 1 0\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse_error("# c\n0 0 0\n1 0 x\n0 1 0\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse_error("0 0 0\n1 0 0\n").find("at least 3"), std::string::npos);
  EXPECT_NE(parse_error("").find("no vertices"), std::string::npos);
  EXPECT_NE(parse_error("VECT\n1 4 0\n3\n0\n0 0 0 1 0 0 0 1 0\n").find("line 2"), std::string::npos);
  EXPECT_NE(parse_error("VECT\n1 3 0\n-3\n0\n0 0 0 1 0 0\n").find("end of file"), std::string::npos);
  EXPECT_NE(parse_error("VECT\n1 3 0\n-3\n0\n0 0 0 1 0 0 0 q 0\n").find("line 5"), std::string::npos);
}

TEST(Coordinates, VectFixture) {
  // Header: polylines, vertices, colours; per-polyline counts (negative =
  // closed); per-polyline colour counts; then the vertices.
  const auto k = sample_fourier(trefoil_spec(), 96);
  std::ostringstream s;
  s << "VECT\n# a trefoil\n1 96 0\n-96\n0\n";
  for (const auto& p : k.vertices()) s << format_real(p.x()) << ' ' << format_real(p.y()) << ' ' << format_real(p.z()) << '\n';
  const auto f = parse_coordinates(s.str());
  ASSERT_EQ(f.components.size(), 1u);
  ASSERT_EQ(f.components[0].size(), 96u);
  for (std::size_t i = 0; i < 96; ++i) EXPECT_EQ(f.components[0][i], k.vertex(i));
  // Several polylines, coordinates spread over lines arbitrarily.
  const auto g = parse_coordinates("VECT\n2 7 0\n-3 -4\n0 0\n0 0 0 1 0 0\n0 1 0\n5 5 5 6 5 5 6 6 5 5 6 5\n");
  ASSERT_EQ(g.components.size(), 2u);
  EXPECT_EQ(g.components[1][3], Point3(5, 6, 5));
}

TEST(Coordinates, RoundTripsExactly) {
  std::mt19937_64 rng(512);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::vector<Point3> v(512);
  for (auto& p : v) p = {u(rng), u(rng) * 1e-7, u(rng) * 1e9};
  KnotFile f;
  f.label = "random 512";
  f.components = {v, {{1.0 / 3, 0, 0}, {0, 2.0 / 3, 0}, {0, 0, 0.1}}};
  for (auto fmt : {CoordinateFormat::kPlain, CoordinateFormat::kVect}) {
    const auto g = parse_coordinates(write_coordinates(f, fmt));
    EXPECT_EQ(g.label, f.label);
    EXPECT_EQ(g.components, f.components);
  }
}

TEST(Coordinates, FileRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "tightknot_io_test";
  std::filesystem::create_directories(dir);
  const auto f = KnotFile::from_knot(sample_fourier(figure_eight_spec(), 100));
  write_knot_file(dir / "k.vect", f, CoordinateFormat::kVect);
  EXPECT_EQ(read_knot_file(dir / "k.vect").components, f.components);
  try {
    read_knot_file(dir / "missing.txt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
  }
  std::filesystem::remove_all(dir);
}

TEST(Reals, SeventeenDigitsRoundTrip) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int i = 0; i < 2000; ++i) {
    double v;
    do {
      const auto b = bits(rng);
      std::memcpy(&v, &b, sizeof v);
    } while (!std::isfinite(v));
    EXPECT_EQ(parse_real(format_real(v)), v);
  }
  EXPECT_THROW(parse_real("1.5x"), Error);
  EXPECT_THROW(parse_real(""), Error);
}

TEST(Fourier, QuarterTurnSquare) {
  FourierKnotSpec s;
  s.x.cos_coeffs = {1.0};
  s.y.sin_coeffs = {1.0};
  const auto k = sample_fourier(s, 4);
  const Point3 want[] = {{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}};
  for (int i = 0; i < 4; ++i) EXPECT_LT((k.vertex(i) - want[i]).norm(), 1e-15);
  EXPECT_THROW(sample_fourier(FourierKnotSpec{}, 10), Error);
  EXPECT_THROW(sample_fourier(s, 2), Error);
}

TEST(Fourier, TrefoilFormula) {
  const auto k = sample_fourier(trefoil_spec(), 96);
  for (std::size_t i = 0; i < 96; ++i) {
    const double t = 2 * std::numbers::pi * static_cast<double>(i) / 96.0;
    const Point3 want(std::sin(t) + 2 * std::sin(2 * t), std::cos(t) - 2 * std::cos(2 * t), -std::sin(3 * t));
    EXPECT_LT((k.vertex(i) - want).norm(), 1e-13);
  }
  EXPECT_EQ(knot_determinant(k).determinant, 3);
  EXPECT_EQ(knot_determinant(sample_fourier(figure_eight_spec(), 96)).determinant, 5);
}

TEST(Fourier, WritheConvergesUnderRefinement) {
  // Polygonal writhe differs from the smooth value by O(1/n^2).
  for (const auto& spec : {trefoil_spec(), figure_eight_spec()}) {
    const double w1 = space_writhe(sample_fourier(spec, 1024));
    const double w2 = space_writhe(sample_fourier(spec, 2048));
    EXPECT_LT(std::abs(w1 - w2), 1e-6);
    const double c1 = space_writhe(sample_fourier(spec, 128));
    const double c2 = space_writhe(sample_fourier(spec, 256));
    EXPECT_NEAR(std::abs(c1 - c2) / std::abs(w1 - w2), 64.0, 16.0);
  }
}

TEST(Fourier, SpecRoundTripAndErrors) {
  auto s = figure_eight_spec();
  s.label = "fig8";
  const auto t = parse_fourier_spec(write_fourier_spec(s));
  EXPECT_EQ(t.label, "fig8");
  EXPECT_EQ(t.x.cos_coeffs, s.x.cos_coeffs);
  EXPECT_EQ(t.y.sin_coeffs, s.y.sin_coeffs);
  EXPECT_EQ(t.z.cos_coeffs, s.z.cos_coeffs);
  EXPECT_EQ(t.z.sin_coeffs, s.z.sin_coeffs);
  const auto p = parse_fourier_spec("# comment\nx cos 1\ny sin 1\n");
  EXPECT_EQ(p.x.cos_coeffs, std::vector<double>{1.0});
  EXPECT_TRUE(p.z.cos_coeffs.empty());
  try {
    parse_fourier_spec("x cos 1\nw sin 2\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(parse_fourier_spec("x tan 1\n"), Error);
  EXPECT_THROW(parse_fourier_spec("x cos 0 0\n"), Error);
}

TEST(HopfChain, SixLinksAtTwentyVertices) {
  const auto f = make_hopf_chain(6, 20);
  ASSERT_EQ(f.components.size(), 6u);
  EXPECT_EQ(f.vertex_count(), 120u);
  const auto k = f.to_knot();
  EXPECT_GT(thickness(k).thickness, 1.0);
  for (std::size_t c = 0; c < k.component_count(); ++c) {
    const auto comp = k.component(c);
    EXPECT_EQ(knot_determinant(comp).determinant, 1);
    // Neighbours link once, others not at all.
    const auto other = k.component((c + 1) % 6);
    EXPECT_NEAR(std::abs(linking_number(comp, other)), 1.0, 1e-6);
    if (k.component_count() > 3) EXPECT_NEAR(linking_number(comp, k.component((c + 3) % 6)), 0.0, 1e-6);
  }
  EXPECT_THROW(make_hopf_chain(1, 20), Error);
  EXPECT_THROW(make_hopf_chain(6, 7), Error);
  EXPECT_EQ(make_hopf_chain(6, 12).vertex_count(), 72u);
}
