// Drives the built command-line tool as a subprocess.

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "tightknot/io.hpp"
#include "tightknot/records.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(TIGHTKNOT_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  while (const auto n = std::fread(buf.data(), 1, buf.size(), p)) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tightknot_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string at(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenerateMeasureAndDiagram) {
  ASSERT_EQ(run("generate fourier --builtin trefoil -n 64 -o " + at("t.txt")).code, 0);
  EXPECT_EQ(tightknot::read_knot_file(at("t.txt")).vertex_count(), 64u);
  const auto m = run("--format delimited measure " + at("t.txt"));
  EXPECT_EQ(m.code, 0);
  EXPECT_NE(m.out.find("vertices,64"), std::string::npos) << m.out;
  EXPECT_NE(m.out.find("ropelength,"), std::string::npos);
  const auto d = run("diagram " + at("t.txt"));
  EXPECT_EQ(d.code, 0);
  EXPECT_NE(d.out.find("determinant     3"), std::string::npos) << d.out;
  ASSERT_EQ(run("generate hopf-chain --links 3 --vertices 12 --coords vect -o " + at("h.vect")).code, 0);
  EXPECT_EQ(tightknot::read_knot_file(at("h.vect")).components.size(), 3u);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("measure " + at("missing.txt")).code, 1);
  EXPECT_EQ(run("generate fourier -n 10").code, 1);  // no output path
  write("bad.txt", "0 0 0\n1 x 0\n0 1 0\n");
  EXPECT_EQ(run("measure " + at("bad.txt")).code, 2);
  // Two edges of this planar quadrilateral cross.
  write("bow.txt", "0 0 0\n1 1 0\n1 0 0\n0 1 0\n");
  EXPECT_EQ(run("tighten " + at("bow.txt") + " -o " + at("x.txt")).code, 3);
  EXPECT_EQ(run("diagram " + at("bow.txt")).code, 3);
  ASSERT_EQ(run("generate fourier -n 24 -o " + at("t.txt")).code, 0);
  EXPECT_EQ(run("tighten " + at("t.txt") + " -o " + at("y.txt") + " --min-step 0.5 --phase1-steps 5 --phase2-steps 5").code, 4);
  EXPECT_EQ(run("tighten " + at("t.txt") + " -o " + at("y.txt") + " --phase1-steps 2 --phase2-steps 3").code, 0);
}

TEST_F(Cli, BatchResumesFromItsOutput) {
  ASSERT_EQ(run("generate fourier --builtin trefoil -n 32 -o " + at("a.txt")).code, 0);
  ASSERT_EQ(run("generate fourier --builtin figure-eight -n 40 -o " + at("b.txt")).code, 0);
  write("m.csv", "path,label,crossing_number,alternating\na.txt,3_1,3,a\nb.txt,4_1,4,a\n");
  const std::string args = "-o " + at("out.csv") + " --format delimited batch " + at("m.csv") +
                           " --phase1-steps 3 --phase2-steps 5";
  const auto first = run(args);
  ASSERT_EQ(first.code, 0);
  EXPECT_NE(first.out.find("computed,2"), std::string::npos) << first.out;
  const auto table = tightknot::read_record_table(at("out.csv"));
  ASSERT_EQ(table.size(), 2u);
  EXPECT_EQ(table[0].determinant_after, "3");
  EXPECT_EQ(table[1].determinant_after, "5");
  const auto again = run(args);
  EXPECT_EQ(again.code, 0);
  EXPECT_NE(again.out.find("reused,2"), std::string::npos) << again.out;
  EXPECT_EQ(tightknot::read_record_table(at("out.csv")), table);
  EXPECT_NE(run(args + " --fresh").out.find("computed,2"), std::string::npos);
}

TEST_F(Cli, SweepAndAnalyze) {
  std::string w;
  for (int k = 0; k < 40; ++k) w += std::to_string(4.0 / 7.0 * (k % 9)) + "\n";
  write("w.txt", w);
  const auto s = run("--format delimited sweep " + at("w.txt"));
  EXPECT_EQ(s.code, 0);
  EXPECT_NE(s.out.find("A,0.57"), std::string::npos) << s.out;

  std::string t = "label,crossing_number,alternating,ropelength,writhe\n";
  for (int c = 3; c <= 8; ++c)
    for (int k = 0; k < 3; ++k)
      t += std::to_string(c) + "_" + std::to_string(k) + "," + std::to_string(c) + ",a," +
           std::to_string(8.0 * c + 9.0 + k) + "," + std::to_string(4.0 / 7.0 * (c - k)) + "\n";
  write("t.csv", t);
  const auto a = run("analyze " + at("t.csv") + " --plots " + at("plots"));
  EXPECT_EQ(a.code, 0);
  EXPECT_FALSE(a.out.empty());
  EXPECT_TRUE(fs::exists(dir_ / "plots"));
}
