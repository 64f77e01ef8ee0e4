#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "omnizoom/geometry.hpp"
#include "omnizoom/image.hpp"
#include "omnizoom/png_io.hpp"

namespace omnizoom {

/// Parameter ranges for random views. Half-open [min, max) draws.
struct SynthConfig {
  double yaw_min = -std::numbers::pi;
  double yaw_max = std::numbers::pi;
  double pitch_min = -std::numbers::pi / 4;
  double pitch_max = std::numbers::pi / 4;
  double zoom_min = 0.8;
  double zoom_max = 1.5;
  std::optional<double> forced_zoom;
  BitDepth bit_depth = BitDepth::eight;
};

/// Missing keys keep their defaults. Keys: yaw_range, pitch_range,
/// zoom_range ([min, max]), zoom_factor (forces a fixed zoom), bit_depth.
SynthConfig synth_config_from_json(const nlohmann::json& j);
SynthConfig load_synth_config(const std::filesystem::path& path);

/// Deterministic in (seed, config). The zoom center is where the front
/// direction (theta = 0, phi = 0) lands after the yaw/pitch rotation.
ViewControlsd sample_transform(std::uint64_t seed, const SynthConfig& config = {});

struct SynthPair {
  ErpImage lr;
  ErpImage gt;
};

/// lr = downsample(hr, scale); gt = hr warped by the controls at scale 1 with
/// the spherical kernel.
SynthPair synth_pair(const ErpImage& hr, const ViewControlsd& controls, int scale, int threads = 0);

struct SynthRecord {
  std::string id;
  std::string hr_path;
  std::string lr_path;
  std::string gt_path;
  std::array<double, 8> matrix{};  // canonicalize(from_controls(controls))
  ViewControlsd controls;
  int scale = 1;
  std::uint64_t seed = 0;
};

nlohmann::ordered_json to_json(const SynthRecord& record);
SynthRecord record_from_json(const nlohmann::json& j);

/// JSONL, one record per line in the given order. Returns the number written.
std::size_t write_manifest(std::span<const SynthRecord> records, const std::filesystem::path& path);
std::vector<SynthRecord> read_manifest(const std::filesystem::path& path);

struct SynthJob {
  std::filesystem::path hr_dir;
  std::filesystem::path out_dir;
  int scale = 8;
  int count_per_image = 1;
  std::uint64_t seed = 0;
  SynthConfig config;
  int threads = 0;
};

/// Per-record seed: a splitmix64 step of (base + index).
std::uint64_t record_seed(std::uint64_t base, std::uint64_t index);

/// Synthesizes lr/ and gt/ PNGs plus manifest.jsonl under out_dir for every
/// PNG in hr_dir (sorted by file name). Record paths are relative to out_dir;
/// hr_path is the input path as discovered.
std::vector<SynthRecord> run_synthesis(const SynthJob& job);

}  // namespace omnizoom
