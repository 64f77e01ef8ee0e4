#include "omnizoom/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>

#include <nlohmann/json.hpp>

#include "omnizoom/dataset.hpp"
#include "omnizoom/metrics.hpp"
#include "omnizoom/png_io.hpp"
#include "omnizoom/serialization.hpp"
#include "omnizoom/service.hpp"
#include "omnizoom/warp.hpp"

namespace omnizoom {

namespace {

int default_threads() {
  if (const char* env = std::getenv("OMNIZOOM_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return 0;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::near_singular: return kExitNearSingular;
    case ErrorCode::io_error: return kExitIo;
    default: return kExitUsage;
  }
}

struct WarpArgs {
  std::string input;
  std::string output;
  std::optional<std::string> matrix;
  std::optional<double> yaw;
  std::optional<double> pitch;
  std::optional<double> zoom;
  std::optional<std::string> zoom_center;
  int scale = 1;
  std::string kernel = "spherical";
  std::string order = "up-first";
  int threads = 0;
  int bit_depth = 8;
  bool any_aspect = false;
};

struct SynthArgs {
  std::string hr_dir;
  std::string out_dir;
  int scale = 8;
  int count = 1;
  std::uint64_t seed = 0;
  std::optional<std::string> config;
  int threads = 0;
  std::optional<int> bit_depth;
};

struct EvalArgs {
  std::string pred;
  std::string gt;
  std::string metric = "both";
  double peak = 1.0;
};

struct ServeArgs {
  int port = 8080;
  std::string host = "0.0.0.0";
  std::string panorama_dir;
  int threads = 0;
};

ViewSpec resolve_view(const WarpArgs& a) {
  const bool has_controls = a.yaw || a.pitch || a.zoom || a.zoom_center;
  if (a.matrix) {
    if (has_controls) throw Error(ErrorCode::invalid_argument, "--matrix excludes --yaw/--pitch/--zoom/--zoom-center");
    return parse_matrix(*a.matrix);
  }
  ViewControlsd v;
  v.yaw = a.yaw.value_or(0.0);
  v.pitch = a.pitch.value_or(0.0);
  v.zoom_factor = a.zoom.value_or(1.0);
  if (!(v.zoom_factor > 0)) throw Error(ErrorCode::invalid_argument, "--zoom must be > 0");
  if (a.zoom_center) {
    const auto c = parse_floats(*a.zoom_center);
    if (c.size() != 2) throw Error(ErrorCode::invalid_argument, "--zoom-center needs theta,phi");
    v.zoom_center = SphericalCoordd(c[0], c[1]);
  } else {
    ViewControlsd rotation = v;
    rotation.zoom_factor = 1;
    v.zoom_center = sp_inv(map_sphere(from_controls(rotation), sp(SphericalCoordd(0, 0))));
  }
  return v;
}

int cmd_warp(const WarpArgs& a, std::ostream& out, std::ostream& err) {
  WarpRequest request;
  try {
    if (!valid_scale(a.scale)) throw Error(ErrorCode::invalid_argument, "--scale must be 1, 2, 4, 8 or 16");
    if (a.bit_depth != 8 && a.bit_depth != 16) throw Error(ErrorCode::invalid_argument, "--bit-depth must be 8 or 16");
    request.view = resolve_view(a);
    request.scale = a.scale;
    request.kernel = parse_kernel(a.kernel);
    request.order = parse_order(a.order);
    request.threads = a.threads;
    // Reject singular views before touching the filesystem.
    (void)sampling_matrix(request.view);
  } catch (const Error& e) {
    err << "warp: " << e.what() << '\n';
    return exit_code_for(e);
  }

  try {
    const ErpImage src = read_png(a.input, a.any_aspect ? AspectPolicy::any : AspectPolicy::equirect);
    const auto start = std::chrono::steady_clock::now();
    const ErpImage result = warp(src, request);
    const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
    write_png(result, a.output, static_cast<BitDepth>(a.bit_depth));
    out << "input " << src.height() << 'x' << src.width() << 'x' << src.channels() << " -> output "
        << result.height() << 'x' << result.width() << 'x' << result.channels() << ", warp " << elapsed.count()
        << " ms\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "warp: " << e.what() << '\n';
    return e.code() == ErrorCode::bad_dims ? kExitIo : exit_code_for(e);
  }
}

int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream& err) {
  SynthJob job;
  try {
    if (a.scale < 1) throw Error(ErrorCode::invalid_argument, "--scale must be >= 1");
    if (a.count < 0) throw Error(ErrorCode::invalid_argument, "--count-per-image must be >= 0");
    job.hr_dir = a.hr_dir;
    job.out_dir = a.out_dir;
    job.scale = a.scale;
    job.count_per_image = a.count;
    job.seed = a.seed;
    job.threads = a.threads;
    if (a.config) job.config = load_synth_config(*a.config);
    if (a.bit_depth) {
      if (*a.bit_depth != 8 && *a.bit_depth != 16) throw Error(ErrorCode::invalid_argument, "--bit-depth must be 8 or 16");
      job.config.bit_depth = static_cast<BitDepth>(*a.bit_depth);
    }
  } catch (const Error& e) {
    err << "synth: " << e.what() << '\n';
    return exit_code_for(e);
  }

  try {
    const auto records = run_synthesis(job);
    if (records.empty()) err << "synth: warning: no records written (no PNG inputs in " << a.hr_dir << ")\n";
    out << "wrote " << records.size() << " record(s) to " << (job.out_dir / "manifest.jsonl").string() << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "synth: " << e.what() << '\n';
    return e.code() == ErrorCode::invalid_argument ? kExitUsage : kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "synth: " << e.what() << '\n';
    return kExitIo;
  }
}

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  if (a.metric != "ws-psnr" && a.metric != "ws-ssim" && a.metric != "both") {
    err << "eval: --metric must be ws-psnr, ws-ssim or both\n";
    return kExitUsage;
  }
  ErpImage pred, gt;
  try {
    pred = read_png(a.pred, AspectPolicy::any);
    gt = read_png(a.gt, AspectPolicy::any);
  } catch (const Error& e) {
    err << "eval: " << e.what() << '\n';
    return kExitIo;
  }
  try {
    nlohmann::ordered_json report;
    if (a.metric != "ws-ssim") report["ws_psnr"] = metric_value_json(ws_psnr(pred, gt, a.peak));
    if (a.metric != "ws-psnr") report["ws_ssim"] = metric_value_json(ws_ssim(pred, gt, a.peak));
    report["peak"] = a.peak;
    report["dims"] = {pred.height(), pred.width(), pred.channels()};
    out << report.dump() << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "eval: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mobius move-and-zoom for equirectangular panoramas", "omnizoom"};
  app.require_subcommand(1);
  const int env_threads = default_threads();

  WarpArgs warp_args;
  warp_args.threads = env_threads;
  auto* warp_cmd = app.add_subcommand("warp", "Warp a panorama by a Mobius matrix or view controls");
  warp_cmd->add_option("--input", warp_args.input, "input PNG")->required();
  warp_cmd->add_option("--output", warp_args.output, "output PNG")->required();
  auto* matrix_opt = warp_cmd->add_option("--matrix", warp_args.matrix, "a.re,a.im,b.re,b.im,c.re,c.im,d.re,d.im");
  auto* yaw_opt = warp_cmd->add_option("--yaw", warp_args.yaw, "radians");
  auto* pitch_opt = warp_cmd->add_option("--pitch", warp_args.pitch, "radians");
  auto* zoom_opt = warp_cmd->add_option("--zoom", warp_args.zoom, "magnification > 0");
  auto* center_opt = warp_cmd->add_option("--zoom-center", warp_args.zoom_center, "theta,phi in radians");
  for (auto* opt : {yaw_opt, pitch_opt, zoom_opt, center_opt}) matrix_opt->excludes(opt);
  warp_cmd->add_option("--scale", warp_args.scale, "upsampling factor (1, 2, 4, 8, 16)");
  warp_cmd->add_option("--kernel", warp_args.kernel, "spherical|nearest|bilinear|bicubic");
  warp_cmd->add_option("--order", warp_args.order, "up-first|transform-first");
  warp_cmd->add_option("--threads", warp_args.threads, "worker threads (default $OMNIZOOM_THREADS)");
  warp_cmd->add_option("--bit-depth", warp_args.bit_depth, "output PNG bit depth (8 or 16)");
  warp_cmd->add_flag("--any-aspect", warp_args.any_aspect, "accept inputs that are not 2:1");

  SynthArgs synth_args;
  synth_args.threads = env_threads;
  auto* synth_cmd = app.add_subcommand("synth", "Synthesize LR / transformed-GT pairs and a JSONL manifest");
  synth_cmd->add_option("--hr-dir", synth_args.hr_dir, "directory of HR PNG panoramas")->required();
  synth_cmd->add_option("--out-dir", synth_args.out_dir, "output directory")->required();
  synth_cmd->add_option("--scale", synth_args.scale, "downsampling factor")->required();
  synth_cmd->add_option("--count-per-image", synth_args.count, "records per HR image")->required();
  synth_cmd->add_option("--seed", synth_args.seed, "base seed")->required();
  synth_cmd->add_option("--config", synth_args.config, "JSON parameter ranges");
  synth_cmd->add_option("--threads", synth_args.threads, "worker threads");
  synth_cmd->add_option("--bit-depth", synth_args.bit_depth, "PNG bit depth (8 or 16)");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Score a prediction against ground truth");
  eval_cmd->add_option("--pred", eval_args.pred, "predicted PNG")->required();
  eval_cmd->add_option("--gt", eval_args.gt, "ground-truth PNG")->required();
  eval_cmd->add_option("--metric", eval_args.metric, "ws-psnr|ws-ssim|both");
  eval_cmd->add_option("--peak", eval_args.peak, "peak signal value");

  ServeArgs serve_args;
  serve_args.threads = env_threads;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the interactive warp API");
  serve_cmd->add_option("--port", serve_args.port, "TCP port")->required();
  serve_cmd->add_option("--panorama-dir", serve_args.panorama_dir, "directory of PNG panoramas")->required();
  serve_cmd->add_option("--host", serve_args.host, "bind address");
  serve_cmd->add_option("--threads", serve_args.threads, "per-request warp threads");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    if (app.get_subcommands().empty()) {
      err << app.help();
    } else {
      err << app.get_subcommands().front()->help();
    }
    return kExitUsage;
  }

  if (warp_cmd->parsed()) return cmd_warp(warp_args, out, err);
  if (synth_cmd->parsed()) return cmd_synth(synth_args, out, err);
  if (eval_cmd->parsed()) return cmd_eval(eval_args, out, err);
  if (serve_cmd->parsed()) {
    ServeOptions options;
    options.port = serve_args.port;
    options.host = serve_args.host;
    options.panorama_dir = serve_args.panorama_dir;
    options.config.threads = serve_args.threads;
    return serve(options);
  }
  return kExitUsage;
}

}  // namespace omnizoom
