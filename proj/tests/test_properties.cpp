// Seeded randomized suites: each property runs over at least 100 cases.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"
#include "tightknot/batch.hpp"
#include "tightknot/io.hpp"
#include "tightknot/records.hpp"
#include "tightknot/tightener.hpp"

using namespace tightknot;
namespace fs = std::filesystem;

namespace {

constexpr int kCases = 100;

TighteningConfig short_run(std::mt19937_64& rng) {
  TighteningConfig c;
  c.phase1_max_steps = std::uniform_int_distribution<long>(0, 4)(rng);
  c.phase2_max_steps = std::uniform_int_distribution<long>(3, 8)(rng);
  c.phase1_residual_target = 1e-9;
  c.phase2_residual_target = 1e-9;
  c.equilateralization_weight = std::uniform_real_distribution<double>(0.0, 2.0)(rng);
  return c;
}

}  // namespace

TEST(TightenerProperties, FeasibleMonotoneDeterministic) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < kCases; ++i) {
    SCOPED_TRACE(i);
    const auto k = tktest::random_knot(rng, 16, 30);
    const auto c = short_run(rng);
    TighteningHooks hooks;
    hooks.checkpoint_interval = 1;
    std::vector<double> p2;
    double worst_thickness = 1.0;
    hooks.on_checkpoint = [&](const PolygonalKnot& knot, const TighteningState& st) {
      const auto t = thickness(knot);
      worst_thickness = std::min(worst_thickness, t.thickness);
      if (st.phase >= 1) p2.push_back(length(knot) / t.thickness);
    };
    const auto a = tighten(k, c, hooks);
    EXPECT_GE(worst_thickness, 1.0 - 1e-9);
    EXPECT_NEAR(thickness(a.knot).thickness, 1.0, 1e-9);
    for (std::size_t s = 1; s < p2.size(); ++s) EXPECT_LE(p2[s], p2[s - 1] + 1e-9);
    // Phase 1 trades ropelength against edge spread; phase 2 alone never loses ground.
    if (c.phase1_max_steps == 0) EXPECT_LE(a.report.final_ropelength, ropelength(k) * (1.0 + 1e-9));
    const auto b = tighten(k, c);
    EXPECT_EQ(a.report.final_ropelength, b.report.final_ropelength);
    EXPECT_EQ(a.knot.vertices().size(), b.knot.vertices().size());
    EXPECT_TRUE(std::equal(a.knot.vertices().begin(), a.knot.vertices().end(), b.knot.vertices().begin()));
  }
}

TEST(ParserProperties, CoordinateFilesRoundTrip) {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> comps(1, 4), verts(3, 200), exp(-30, 30);
  std::normal_distribution<double> g;
  for (int i = 0; i < kCases; ++i) {
    KnotFile f;
    f.label = i % 3 ? "case-" + std::to_string(i) : "";
    const int nc = comps(rng);
    for (int c = 0; c < nc; ++c) {
      std::vector<Point3> v(verts(rng));
      const double scale = std::pow(10.0, exp(rng));
      for (auto& p : v) p = scale * Point3(g(rng), g(rng), g(rng));
      f.components.push_back(std::move(v));
    }
    for (auto fmt : {CoordinateFormat::kPlain, CoordinateFormat::kVect}) {
      const auto back = parse_coordinates(write_coordinates(f, fmt));
      EXPECT_EQ(back.components, f.components) << i;
      EXPECT_EQ(back.label, f.label) << i;
    }
  }
}

TEST(ParserProperties, RecordTablesRoundTrip) {
  std::mt19937_64 rng(78);
  for (int i = 0; i < kCases; ++i) {
    RecordTable t;
    const int rows = std::uniform_int_distribution<int>(0, 12)(rng);
    for (int r = 0; r < rows; ++r) t.push_back(tktest::random_record(rng, r));
    EXPECT_EQ(parse_record_table(write_record_table(t)), t) << i;
  }
}

TEST(ParserProperties, FourierSpecsRoundTrip) {
  std::mt19937_64 rng(79);
  std::uniform_int_distribution<int> terms(0, 6);
  std::normal_distribution<double> g;
  for (int i = 0; i < kCases; ++i) {
    FourierKnotSpec s;
    s.label = "f" + std::to_string(i);
    for (auto* series : {&s.x, &s.y, &s.z}) {
      series->cos_coeffs.resize(terms(rng));
      series->sin_coeffs.resize(terms(rng));
      for (auto& v : series->cos_coeffs) v = g(rng);
      for (auto& v : series->sin_coeffs) v = g(rng);
    }
    s.x.cos_coeffs.push_back(1.0);  // never empty
    const auto t = parse_fourier_spec(write_fourier_spec(s));
    EXPECT_EQ(t.label, s.label);
    for (int a = 0; a < 3; ++a) {
      const auto& u = a == 0 ? s.x : a == 1 ? s.y : s.z;
      const auto& w = a == 0 ? t.x : a == 1 ? t.y : t.z;
      EXPECT_EQ(u.cos_coeffs, w.cos_coeffs) << i;
      EXPECT_EQ(u.sin_coeffs, w.sin_coeffs) << i;
    }
  }
}

TEST(BatchProperties, RerunIsIdempotent) {
  std::mt19937_64 rng(80);
  const auto dir = fs::temp_directory_path() / "tightknot_batch_props";
  fs::remove_all(dir);
  fs::create_directories(dir);
  for (int i = 0; i < kCases; ++i) {
    SCOPED_TRACE(i);
    std::vector<ManifestEntry> manifest;
    const int n = std::uniform_int_distribution<int>(1, 3)(rng);
    for (int k = 0; k < n; ++k) {
      ManifestEntry e;
      e.path = dir / ("k" + std::to_string(i) + "_" + std::to_string(k) + ".txt");
      e.metadata.label = "knot " + std::to_string(k);
      if (std::bernoulli_distribution(0.2)(rng)) {
        std::ofstream(e.path) << "1 2 3\n";  // too short: an error row
      } else {
        write_knot_file(e.path, KnotFile::from_knot(tktest::random_knot(rng, 12, 20)));
      }
      manifest.push_back(e);
    }
    BatchConfig config;
    config.tightening.phase1_max_steps = 1;
    config.tightening.phase2_max_steps = 2;
    config.threads = std::uniform_int_distribution<unsigned>(1, 3)(rng);
    const auto first = batch_run(manifest, config);
    write_record_table_file(dir / "out.csv", first);
    BatchOptions again;
    again.previous = read_record_table(dir / "out.csv");
    BatchSummary s;
    EXPECT_EQ(batch_run(manifest, config, again, &s), first);
    EXPECT_EQ(s.computed, 0u);
    EXPECT_EQ(s.reused, manifest.size());
  }
  fs::remove_all(dir);
}
