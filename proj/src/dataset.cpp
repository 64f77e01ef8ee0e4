#include "omnizoom/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include <fmt/format.h>

#include "omnizoom/serialization.hpp"
#include "omnizoom/warp.hpp"

namespace omnizoom {

namespace {

// Portable [0, 1) draw: the top 53 bits of the engine output.
double unit_draw(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

double draw(std::mt19937_64& engine, double lo, double hi) { return lo + (hi - lo) * unit_draw(engine); }

void read_range(const nlohmann::json& j, const char* key, double& lo, double& hi) {
  if (!j.contains(key)) return;
  const auto& r = j.at(key);
  if (!r.is_array() || r.size() != 2) throw Error(ErrorCode::invalid_argument, std::string(key) + " must be [min, max]");
  lo = r[0].get<double>();
  hi = r[1].get<double>();
  if (!(lo <= hi)) throw Error(ErrorCode::invalid_argument, std::string(key) + " has min > max");
}

}  // namespace

SynthConfig synth_config_from_json(const nlohmann::json& j) {
  SynthConfig c;
  read_range(j, "yaw_range", c.yaw_min, c.yaw_max);
  read_range(j, "pitch_range", c.pitch_min, c.pitch_max);
  read_range(j, "zoom_range", c.zoom_min, c.zoom_max);
  if (!(c.zoom_min > 0)) throw Error(ErrorCode::invalid_argument, "zoom_range must be positive");
  if (j.contains("zoom_factor")) {
    c.forced_zoom = j.at("zoom_factor").get<double>();
    if (!(*c.forced_zoom > 0)) throw Error(ErrorCode::invalid_argument, "zoom_factor must be positive");
  }
  if (j.contains("bit_depth")) {
    const int bits = j.at("bit_depth").get<int>();
    if (bits != 8 && bits != 16) throw Error(ErrorCode::invalid_argument, "bit_depth must be 8 or 16");
    c.bit_depth = static_cast<BitDepth>(bits);
  }
  return c;
}

SynthConfig load_synth_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open config " + path.string());
  try {
    return synth_config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("bad config: ") + e.what());
  }
}

ViewControlsd sample_transform(std::uint64_t seed, const SynthConfig& config) {
  std::mt19937_64 engine(seed);
  ViewControlsd v;
  v.yaw = draw(engine, config.yaw_min, config.yaw_max);
  v.pitch = draw(engine, config.pitch_min, config.pitch_max);
  const double zoom = draw(engine, config.zoom_min, config.zoom_max);
  v.zoom_factor = config.forced_zoom.value_or(zoom);

  ViewControlsd rotation_only = v;
  rotation_only.zoom_factor = 1;
  const SpherePointd front = sp(SphericalCoordd(0, 0));
  v.zoom_center = sp_inv(map_sphere(from_controls(rotation_only), front));
  return v;
}

SynthPair synth_pair(const ErpImage& hr, const ViewControlsd& controls, int scale, int threads) {
  if (scale < 1 || hr.height() % scale != 0 || hr.width() % scale != 0) {
    throw Error(ErrorCode::bad_dims, "HR dimensions must be divisible by the scale");
  }
  WarpRequest request;
  request.view = controls;
  request.scale = 1;
  request.kernel = ResampleKernel::spherical;
  request.order = WarpOrder::upsample_then_transform;
  request.threads = threads;
  return {downsample(hr, scale), warp(hr, request)};
}

nlohmann::ordered_json to_json(const SynthRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["hr_path"] = r.hr_path;
  j["lr_path"] = r.lr_path;
  j["gt_path"] = r.gt_path;
  j["matrix"] = r.matrix;
  j["controls"] = to_json(r.controls);
  j["scale"] = r.scale;
  j["seed"] = r.seed;
  return j;
}

SynthRecord record_from_json(const nlohmann::json& j) {
  SynthRecord r;
  r.id = j.at("id").get<std::string>();
  r.hr_path = j.at("hr_path").get<std::string>();
  r.lr_path = j.at("lr_path").get<std::string>();
  r.gt_path = j.at("gt_path").get<std::string>();
  r.matrix = j.at("matrix").get<std::array<double, 8>>();
  r.controls = controls_from_json(j.at("controls"));
  r.scale = j.at("scale").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  return r;
}

std::size_t write_manifest(std::span<const SynthRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write manifest " + path.string());
  for (const SynthRecord& r : records) out << to_json(r).dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::io_error, "short write to " + path.string());
  return records.size();
}

std::vector<SynthRecord> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open manifest " + path.string());
  std::vector<SynthRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(record_from_json(nlohmann::json::parse(line)));
  }
  return records;
}

std::uint64_t record_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + index + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<SynthRecord> run_synthesis(const SynthJob& job) {
  namespace fs = std::filesystem;
  if (job.scale < 1) throw Error(ErrorCode::invalid_argument, "scale must be >= 1");
  if (job.count_per_image < 0) throw Error(ErrorCode::invalid_argument, "count per image must be >= 0");

  std::error_code ec;
  if (!fs::is_directory(job.hr_dir, ec)) throw Error(ErrorCode::io_error, "not a directory: " + job.hr_dir.string());
  std::vector<fs::path> inputs;
  for (const auto& entry : fs::directory_iterator(job.hr_dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (ext == ".png") inputs.push_back(entry.path());
  }
  std::sort(inputs.begin(), inputs.end());

  fs::create_directories(job.out_dir / "lr", ec);
  fs::create_directories(job.out_dir / "gt", ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot create output directories under " + job.out_dir.string());

  std::vector<SynthRecord> records;
  std::uint64_t index = 0;
  for (const fs::path& input : inputs) {
    const ErpImage hr = read_png(input);
    for (int k = 0; k < job.count_per_image; ++k, ++index) {
      SynthRecord r;
      r.id = fmt::format("{}_{:03d}", input.stem().string(), k);
      r.hr_path = input.string();
      r.lr_path = (fs::path("lr") / (r.id + ".png")).generic_string();
      r.gt_path = (fs::path("gt") / (r.id + ".png")).generic_string();
      r.seed = record_seed(job.seed, index);
      r.controls = sample_transform(r.seed, job.config);
      r.matrix = matrix_coefficients(canonicalize(from_controls(r.controls)));
      r.scale = job.scale;

      const SynthPair pair = synth_pair(hr, r.controls, job.scale, job.threads);
      write_png(pair.lr, job.out_dir / r.lr_path, job.config.bit_depth);
      write_png(pair.gt, job.out_dir / r.gt_path, job.config.bit_depth);
      records.push_back(std::move(r));
    }
  }
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  write_manifest(records, job.out_dir / "manifest.jsonl");
  return records;
}

}  // namespace omnizoom
