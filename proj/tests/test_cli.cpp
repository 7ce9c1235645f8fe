// Runs the command-line tool as a subprocess. TENSORSCALE_CLI is the path of
// the built binary.
#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "tensorscale/io.hpp"

namespace tensorscale {
namespace {

using nlohmann::json;

int run(const std::string& args) {
  const std::string cmd = std::string(TENSORSCALE_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tensorscale_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string d(const std::string& sub) const { return (dir_ / sub).string(); }

  fs::path dir_;
};

TEST_F(CliTest, SynthWritesFieldAndMasks) {
  ASSERT_EQ(run("synth --kind line2d --width 8 --shape 40,48 --outdir " + d("s")), 0);
  const ScalarField f = read_field(dir_ / "s/field.f32");
  EXPECT_EQ(f.shape(), (Shape{40, 48}));
  EXPECT_EQ(read_mask(dir_ / "s/feature_mask.u8").shape(), f.shape());
  EXPECT_TRUE(fs::exists(dir_ / "s/skeleton_mask.u8"));
  const json info = json::parse(slurp(dir_ / "s/synth.json"));
  EXPECT_EQ(info["shape"], json({40, 48}));
}

TEST_F(CliTest, AnalyzeWritesArtifacts2D) {
  ASSERT_EQ(run("synth --kind disk2d --width 10 --shape 48,48 --outdir " + d("s")), 0);
  ASSERT_EQ(run("analyze --input " + d("s/field.f32") + " --mask " + d("s/skeleton_mask.u8") +
                " --bins 7 --sigma-min 1 --sigma-max 6 --outdir " + d("a")),
            0);
  for (const char* name : {"scale.f32", "scale_corrected.f32", "width.f32", "anisotropy.f32", "orientation.f32",
                           "orientation_preview.ppm", "histogram.csv", "advice.txt", "run.json"})
    EXPECT_TRUE(fs::exists(dir_ / "a" / name)) << name;
  std::istringstream csv(slurp(dir_ / "a/histogram.csv"));
  std::string line;
  int rows = 0;
  std::getline(csv, line);
  EXPECT_EQ(line, "bin_center,count");
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 7);
  const json run_info = json::parse(slurp(dir_ / "a/run.json"));
  EXPECT_EQ(run_info["bins"], 7);
  EXPECT_EQ(run_info["scale_grid"]["sigmas"].size(), 6u);
  EXPECT_TRUE(run_info["statistics"]["width"].contains("mask"));
}

TEST_F(CliTest, AnalyzeWritesArtifacts3D) {
  ASSERT_EQ(run("synth --kind cylinder3d --width 4 --shape 16,16,16 --outdir " + d("s")), 0);
  ASSERT_EQ(run("analyze --input " + d("s/field.f32") + " --sigma-min 1 --sigma-max 2 --outdir " + d("a")), 0);
  for (const char* name : {"fa.f32", "linearity.f32", "planarity.f32", "sphericity.f32", "orientation_x.f32",
                           "orientation_y.f32", "orientation_z.f32"})
    EXPECT_TRUE(fs::exists(dir_ / "a" / name)) << name;
}

TEST_F(CliTest, AnalyzeIsByteIdenticalAcrossRuns) {
  ASSERT_EQ(run("synth --kind ellipse2d --width 8 --shape 48,64 --noise iid --noise-amplitude 0.1 --seed 3 "
                "--outdir " + d("s")),
            0);
  const std::string args = "analyze --input " + d("s/field.f32") + " --sigma-min 1 --sigma-max 5 --outdir ";
  ASSERT_EQ(run(args + d("a")), 0);
  ASSERT_EQ(run(args + d("b")), 0);
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "a")) {
    EXPECT_EQ(slurp(e.path()), slurp(dir_ / "b" / e.path().filename())) << e.path().filename();
    ++files;
  }
  EXPECT_GT(files, 10);
}

TEST_F(CliTest, CompareIdenticalAndOrthogonal) {
  ScalarField a(Shape{4, 4}, M_PI / 2), b(Shape{4, 4}, M_PI);
  fs::create_directories(dir_ / "a");
  fs::create_directories(dir_ / "b");
  write_field(dir_ / "a/orientation.f32", a);
  write_field(dir_ / "b/orientation.f32", b);
  ASSERT_EQ(run("compare --a " + d("a") + " --b " + d("a") + " --output " + d("same.json")), 0);
  EXPECT_NEAR(json::parse(slurp(dir_ / "same.json"))["statistics"]["full"]["mean"].get<double>(), 0.0, 1e-9);
  ASSERT_EQ(run("compare --a " + d("a") + " --b " + d("b") + " --output " + d("orth.json")), 0);
  EXPECT_NEAR(json::parse(slurp(dir_ / "orth.json"))["statistics"]["full"]["mean"].get<double>(), 90.0, 1e-4);
}

TEST_F(CliTest, ResampleDownAndUp) {
  ASSERT_EQ(run("synth --kind disk2d --width 8 --shape 30,32 --outdir " + d("s")), 0);
  ASSERT_EQ(run("resample --input " + d("s/field.f32") + " --mode down2 --outdir " + d("down")), 0);
  EXPECT_EQ(read_field(dir_ / "down/field.f32").shape(), (Shape{15, 16}));
  ASSERT_EQ(run("resample --input " + d("down/field.f32") + " --mode up2 --shape 30,32 --outdir " + d("up")), 0);
  EXPECT_EQ(read_field(dir_ / "up/field.f32").shape(), (Shape{30, 32}));
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run("analyze --input " + d("missing.f32") + " --outdir " + d("a")), 2);
  EXPECT_EQ(run("synth --kind torus --outdir " + d("s")), 3);
  EXPECT_EQ(run("analyze --bins 3"), 3);
  ASSERT_EQ(run("synth --kind disk2d --width 8 --shape 30,32 --outdir " + d("s")), 0);
  EXPECT_EQ(run("analyze --input " + d("s/field.f32") + " --gamma 3.5 --outdir " + d("a")), 3);
  fs::create_directories(dir_ / "x");
  fs::create_directories(dir_ / "y");
  write_field(dir_ / "x/orientation.f32", ScalarField(Shape{4, 4}, 1.0));
  write_field(dir_ / "y/orientation.f32", ScalarField(Shape{4, 5}, 1.0));
  EXPECT_EQ(run("compare --a " + d("x") + " --b " + d("y")), 4);
}

}  // namespace
}  // namespace tensorscale
