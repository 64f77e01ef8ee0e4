#include <gtest/gtest.h>

#include <fmt/format.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "omnizoom/cli.hpp"
#include "omnizoom/metrics.hpp"
#include "omnizoom/png_io.hpp"
#include "omnizoom/warp.hpp"
#include "support.hpp"

namespace omnizoom {
namespace {

namespace fs = std::filesystem;
using testing::kPi;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Random image whose samples are exact in 8-bit PNG.
ErpImage grid_image(Index h, Index w, Index c, std::uint64_t seed) {
  ErpImage img = testing::random_image(h, w, c, seed);
  for (Index k = 0; k < img.samples().size(); ++k) {
    img.samples().data()[k] = quantize(img.samples().data()[k], BitDepth::eight) / 255.0;
  }
  return img;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    src = grid_image(16, 32, 3, 1);
    input = (dir.path() / "in.png").string();
    write_png(src, input);
  }

  std::string path(const std::string& name) const { return (dir.path() / name).string(); }

  testing::TempDir dir{"cli"};
  ErpImage src;
  std::string input;
};

TEST_F(CliTest, IdentityMatrixReproducesInput) {
  const CliRun r = run({"warp", "--input", input, "--output", path("out.png"), "--matrix", "1,0,0,0,0,0,1,0"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("16x32x3"), std::string::npos);
  EXPECT_LE(testing::max_abs_diff(read_png(path("out.png")), src), 1e-12);
}

TEST_F(CliTest, QuarterTurnYawIsColumnShift) {
  const CliRun r = run({"warp", "--input", input, "--output", path("out.png"), "--yaw", fmt::format("{}", kPi / 2),
                        "--kernel", "bilinear"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_LE(testing::max_abs_diff(read_png(path("out.png")), testing::column_shift(src, 8)), 0.5 / 255);
}

TEST_F(CliTest, MatchesLibraryWarp) {
  const CliRun r = run({"warp", "--input", input, "--output", path("out.png"), "--yaw", "0.4", "--pitch", "-0.3",
                        "--zoom", "1.2", "--zoom-center", "0.1,0.2", "--scale", "2", "--bit-depth", "16"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  ViewControlsd v;
  v.yaw = 0.4;
  v.pitch = -0.3;
  v.zoom_factor = 1.2;
  v.zoom_center = SphericalCoordd(0.1, 0.2);
  WarpRequest req;
  req.view = v;
  req.scale = 2;
  const ErpImage want = warp(src, req);
  const ErpImage got = read_png(path("out.png"));
  ASSERT_TRUE(got.same_shape(want));
  EXPECT_LE(testing::max_abs_diff(got, want), 0.5 / 65535 + 1e-9);
}

TEST_F(CliTest, WarpIsDeterministic) {
  for (const char* name : {"a.png", "b.png"}) {
    ASSERT_EQ(run({"warp", "--input", input, "--output", path(name), "--yaw", "1", "--zoom", "1.5"}).code, kExitOk);
  }
  EXPECT_EQ(slurp(path("a.png")), slurp(path("b.png")));
}

TEST_F(CliTest, WarpExitCodes) {
  const std::string out = path("out.png");
  EXPECT_EQ(run({"warp", "--input", input, "--output", out, "--matrix", "1,0,2,0,2,0,4,0"}).code, kExitNearSingular);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_EQ(run({"warp", "--input", path("missing.png"), "--output", out}).code, kExitIo);
  EXPECT_EQ(run({"warp", "--input", input, "--output", out, "--matrix", "1,0,0,0,0,0,1,0", "--yaw", "1"}).code,
            kExitUsage);
  EXPECT_EQ(run({"warp", "--input", input, "--output", out, "--scale", "3"}).code, kExitUsage);
  EXPECT_EQ(run({"warp", "--input", input, "--output", out, "--kernel", "lanczos"}).code, kExitUsage);
  EXPECT_EQ(run({"warp", "--input", input, "--output", out, "--zoom", "-1"}).code, kExitUsage);
  EXPECT_EQ(run({"warp", "--input", input, "--output", out, "--bogus"}).code, kExitUsage);
  EXPECT_EQ(run({"warp", "--input", input}).code, kExitUsage);
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"dance"}).code, kExitUsage);

  write_png(ErpImage(4, 6, 1, 0.5, AspectPolicy::any), path("odd.png"));
  EXPECT_EQ(run({"warp", "--input", path("odd.png"), "--output", out}).code, kExitIo);
  EXPECT_EQ(run({"warp", "--input", path("odd.png"), "--output", out, "--any-aspect"}).code, kExitOk);
}

TEST_F(CliTest, HelpExitsZero) {
  const CliRun r = run({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("warp"), std::string::npos);
}

TEST_F(CliTest, SynthEmptyDirectoryWarns) {
  fs::create_directories(dir.path() / "empty");
  const CliRun r = run({"synth", "--hr-dir", path("empty"), "--out-dir", path("out"), "--scale", "2",
                        "--count-per-image", "1", "--seed", "0"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_TRUE(slurp(dir.path() / "out" / "manifest.jsonl").empty());
}

TEST_F(CliTest, SynthWritesRecordsDeterministically) {
  fs::create_directories(dir.path() / "hr");
  write_png(testing::smooth_panorama(32, 3, 3), dir.path() / "hr" / "p.png");
  for (const char* out : {"o1", "o2"}) {
    const CliRun r = run({"synth", "--hr-dir", path("hr"), "--out-dir", path(out), "--scale", "4",
                          "--count-per-image", "2", "--seed", "17"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
  }
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir.path() / "o1")) {
    if (!e.is_regular_file()) continue;
    ++files;
    const fs::path rel = fs::relative(e.path(), dir.path() / "o1");
    EXPECT_EQ(slurp(e.path()), slurp(dir.path() / "o2" / rel)) << rel;
  }
  EXPECT_EQ(files, 5u);
  const std::string manifest = slurp(dir.path() / "o1" / "manifest.jsonl");
  EXPECT_EQ(std::count(manifest.begin(), manifest.end(), '\n'), 2);
}

TEST_F(CliTest, SynthErrors) {
  EXPECT_EQ(run({"synth", "--hr-dir", path("nope"), "--out-dir", path("o"), "--scale", "2", "--count-per-image", "1",
                 "--seed", "0"})
                .code,
            kExitIo);
  EXPECT_EQ(run({"synth", "--hr-dir", path("nope"), "--out-dir", path("o")}).code, kExitUsage);
  EXPECT_EQ(run({"synth", "--hr-dir", path("nope"), "--out-dir", path("o"), "--scale", "2", "--count-per-image", "1",
                 "--seed", "0", "--bit-depth", "12"})
                .code,
            kExitUsage);
}

TEST_F(CliTest, EvalIdenticalIsInfinite) {
  const CliRun r = run({"eval", "--pred", input, "--gt", input});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["ws_psnr"], "inf");
  EXPECT_DOUBLE_EQ(j["ws_ssim"].get<double>(), 1.0);
  EXPECT_EQ(j["dims"], nlohmann::json::parse("[16,32,3]"));
}

TEST_F(CliTest, EvalHandFixture) {
  ErpImage a(2, 4, 1, 0.5);
  ErpImage b(2, 4, 1);
  for (Index j = 0; j < 4; ++j) {
    b(0, j, 0) = 0.6;
    b(1, j, 0) = 0.7;
  }
  write_png(a, path("a.png"), BitDepth::sixteen);
  write_png(b, path("b.png"), BitDepth::sixteen);
  const CliRun r = run({"eval", "--pred", path("a.png"), "--gt", path("b.png"), "--metric", "ws-psnr"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_FALSE(j.contains("ws_ssim"));
  EXPECT_NEAR(j["ws_psnr"].get<double>(), 16.0206, 1e-3);
  EXPECT_NEAR(j["ws_psnr"].get<double>(), ws_psnr(read_png(path("a.png")), read_png(path("b.png"))), 1e-12);
}

TEST_F(CliTest, EvalErrors) {
  write_png(ErpImage(8, 16, 3, 0.5), path("small.png"));
  EXPECT_EQ(run({"eval", "--pred", input, "--gt", path("small.png")}).code, kExitUsage);
  EXPECT_EQ(run({"eval", "--pred", input, "--gt", path("missing.png")}).code, kExitIo);
  EXPECT_EQ(run({"eval", "--pred", input, "--gt", input, "--metric", "mse"}).code, kExitUsage);
  // WS-SSIM needs 11 x 11 windows.
  EXPECT_EQ(run({"eval", "--pred", path("small.png"), "--gt", path("small.png"), "--metric", "ws-ssim"}).code,
            kExitUsage);
}

}  // namespace
}  // namespace omnizoom
