#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "omnizoom/dataset.hpp"
#include "omnizoom/metrics.hpp"
#include "omnizoom/serialization.hpp"
#include "omnizoom/warp.hpp"
#include "support.hpp"

namespace omnizoom {
namespace {

using testing::kPi;
namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool controls_equal(const ViewControlsd& a, const ViewControlsd& b) {
  return a.yaw == b.yaw && a.pitch == b.pitch && a.zoom_factor == b.zoom_factor &&
         a.zoom_center.theta == b.zoom_center.theta && a.zoom_center.phi == b.zoom_center.phi;
}

TEST(SampleTransform, Deterministic) {
  EXPECT_TRUE(controls_equal(sample_transform(42), sample_transform(42)));
  EXPECT_FALSE(controls_equal(sample_transform(42), sample_transform(43)));
}

TEST(SampleTransform, DefaultRangesAndYawMean) {
  double yaw_sum = 0;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const ViewControlsd v = sample_transform(record_seed(99, s));
    ASSERT_GE(v.yaw, -kPi);
    ASSERT_LT(v.yaw, kPi);
    ASSERT_GE(v.pitch, -kPi / 4);
    ASSERT_LE(v.pitch, kPi / 4);
    ASSERT_GE(v.zoom_factor, 0.8);
    ASSERT_LE(v.zoom_factor, 1.5);
    yaw_sum += v.yaw;
  }
  EXPECT_LT(std::abs(yaw_sum / 10000), 0.05);
}

TEST(SampleTransform, ZoomCenterIsRotatedFront) {
  const ViewControlsd v = sample_transform(5);
  ViewControlsd rot = v;
  rot.zoom_factor = 1;
  const SpherePointd want = map_sphere(from_controls(rot), SpherePointd(1, 0, 0));
  EXPECT_LE((sp(v.zoom_center) - want).norm(), 1e-12);
}

TEST(SampleTransform, ForcedUnitZoomGivesRotation) {
  const SynthConfig config = synth_config_from_json(nlohmann::json::parse(R"({"zoom_factor": 1.0})"));
  const Mobiusd m = from_controls(sample_transform(7, config));
  // Unitary up to scale: M M^H is a multiple of the identity.
  const auto g = (m.matrix() * m.matrix().adjoint()).eval();
  EXPECT_NEAR(std::abs(g(0, 1)), 0, 1e-12);
  EXPECT_NEAR(std::abs(g(0, 0) - g(1, 1)), 0, 1e-12);
}

TEST(SynthConfig, OverridesAndErrors) {
  const SynthConfig c = synth_config_from_json(
      nlohmann::json::parse(R"({"yaw_range": [0, 0.5], "pitch_range": [-0.1, 0.1], "zoom_range": [1, 2], "bit_depth": 16})"));
  EXPECT_EQ(c.yaw_max, 0.5);
  EXPECT_EQ(c.pitch_min, -0.1);
  EXPECT_EQ(c.zoom_max, 2);
  EXPECT_EQ(c.bit_depth, BitDepth::sixteen);
  for (int s = 0; s < 100; ++s) {
    const ViewControlsd v = sample_transform(s, c);
    EXPECT_GE(v.yaw, 0);
    EXPECT_LT(v.yaw, 0.5);
  }
  EXPECT_THROW(synth_config_from_json(nlohmann::json::parse(R"({"yaw_range": [1, 0]})")), Error);
  EXPECT_THROW(synth_config_from_json(nlohmann::json::parse(R"({"bit_depth": 12})")), Error);
  EXPECT_THROW(synth_config_from_json(nlohmann::json::parse(R"({"zoom_range": [0, 1]})")), Error);
}

TEST(SynthPair, IdentityControls) {
  const ErpImage hr = testing::random_image(16, 32, 3, 1);
  const SynthPair p = synth_pair(hr, ViewControlsd{}, 4);
  EXPECT_EQ(p.lr.height(), 4);
  EXPECT_EQ(p.lr.width(), 8);
  EXPECT_LE(testing::max_abs_diff(p.gt, hr), 1e-6);
}

TEST(SynthPair, ScaleEightShape) {
  const ErpImage hr(1024, 2048, 1, 0.5);
  const SynthPair p = synth_pair(hr, ViewControlsd{}, 8, 0);
  EXPECT_EQ(p.lr.height(), 128);
  EXPECT_EQ(p.lr.width(), 256);
}

TEST(SynthPair, YawIsColumnShift) {
  const ErpImage hr = testing::random_image(16, 32, 2, 2);
  ViewControlsd v;
  v.yaw = 2 * kPi * 5 / 32;
  EXPECT_LE(testing::max_abs_diff(synth_pair(hr, v, 2).gt, testing::column_shift(hr, 5)), 1e-6);
  EXPECT_THROW(synth_pair(ErpImage(6, 12, 1), v, 4), Error);
}

SynthRecord sample_record(int k) {
  SynthRecord r;
  r.id = "pano_" + std::to_string(k);
  r.hr_path = "hr/pano.png";
  r.lr_path = "lr/" + r.id + ".png";
  r.gt_path = "gt/" + r.id + ".png";
  r.seed = record_seed(3, k);
  r.controls = sample_transform(r.seed);
  r.matrix = matrix_coefficients(canonicalize(from_controls(r.controls)));
  r.scale = 8;
  return r;
}

TEST(Manifest, EmptyList) {
  testing::TempDir dir("manifest");
  EXPECT_EQ(write_manifest({}, dir.path() / "m.jsonl"), 0u);
  EXPECT_TRUE(slurp(dir.path() / "m.jsonl").empty());
}

TEST(Manifest, RoundTripAndFieldOrder) {
  testing::TempDir dir("manifest");
  const std::vector<SynthRecord> records = {sample_record(0), sample_record(1), sample_record(2)};
  EXPECT_EQ(write_manifest(records, dir.path() / "m.jsonl"), 3u);
  const std::string text = slurp(dir.path() / "m.jsonl");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  EXPECT_EQ(text.rfind(R"({"id":"pano_0","hr_path":)", 0), 0u);
  const auto back = read_manifest(dir.path() / "m.jsonl");
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(back[k].id, records[k].id);
    EXPECT_EQ(back[k].matrix, records[k].matrix);
    EXPECT_TRUE(controls_equal(back[k].controls, records[k].controls));
    EXPECT_EQ(back[k].seed, records[k].seed);
    EXPECT_EQ(back[k].scale, records[k].scale);
  }
  write_manifest(records, dir.path() / "again.jsonl");
  EXPECT_EQ(slurp(dir.path() / "again.jsonl"), text);
  EXPECT_THROW(write_manifest(records, dir.path() / "missing" / "m.jsonl"), Error);
}

TEST(RunSynthesis, WritesTreeDeterministically) {
  testing::TempDir dir("synth");
  fs::create_directories(dir.path() / "hr");
  write_png(testing::smooth_panorama(32, 3, 1), dir.path() / "hr" / "b.png");
  write_png(testing::smooth_panorama(32, 3, 2), dir.path() / "hr" / "a.png");
  SynthJob job;
  job.hr_dir = dir.path() / "hr";
  job.out_dir = dir.path() / "out1";
  job.scale = 4;
  job.count_per_image = 2;
  job.seed = 11;
  const auto records = run_synthesis(job);
  ASSERT_EQ(records.size(), 4u);
  EXPECT_EQ(records[0].id, "a_000");
  EXPECT_EQ(records[3].id, "b_001");
  for (const auto& r : records) {
    EXPECT_TRUE(fs::exists(job.out_dir / r.lr_path));
    EXPECT_TRUE(fs::exists(job.out_dir / r.gt_path));
    EXPECT_EQ(r.matrix, matrix_coefficients(canonicalize(from_controls(r.controls))));
    EXPECT_EQ(read_png(job.out_dir / r.lr_path).height(), 8);
  }
  job.out_dir = dir.path() / "out2";
  run_synthesis(job);
  for (const char* rel : {"manifest.jsonl", "lr/a_000.png", "gt/b_001.png"}) {
    EXPECT_EQ(slurp(dir.path() / "out1" / rel), slurp(dir.path() / "out2" / rel)) << rel;
  }
}

TEST(RunSynthesis, EmptyDirectory) {
  testing::TempDir dir("synth-empty");
  fs::create_directories(dir.path() / "hr");
  SynthJob job;
  job.hr_dir = dir.path() / "hr";
  job.out_dir = dir.path() / "out";
  EXPECT_TRUE(run_synthesis(job).empty());
  EXPECT_TRUE(slurp(job.out_dir / "manifest.jsonl").empty());
}

TEST(RunSynthesis, SupervisionConsistency) {
  // Records store the forward content motion; the sampling transform that
  // reproduces gt is its inverse.
  testing::TempDir dir("synth-sup");
  fs::create_directories(dir.path() / "hr");
  write_png(testing::smooth_panorama(64, 3, 5), dir.path() / "hr" / "p.png");
  SynthJob job;
  job.hr_dir = dir.path() / "hr";
  job.out_dir = dir.path() / "out";
  job.scale = 4;
  job.count_per_image = 3;
  job.seed = 1;
  const auto records = run_synthesis(job);
  ASSERT_EQ(records.size(), 3u);
  for (std::size_t k = 0; k < records.size(); ++k) {
    const ErpImage lr = read_png(job.out_dir / records[k].lr_path);
    const ErpImage gt = read_png(job.out_dir / records[k].gt_path);
    auto score = [&](const SynthRecord& r) {
      WarpRequest req;
      req.view = inverse(matrix_from_coefficients(r.matrix));
      req.scale = r.scale;
      return ws_psnr(warp(lr, req), gt);
    };
    const double matched = score(records[k]);
    const double mismatched = score(records[(k + 1) % records.size()]);
    EXPECT_TRUE(std::isfinite(matched));
    EXPECT_GT(matched, mismatched);
  }
}

}  // namespace
}  // namespace omnizoom
