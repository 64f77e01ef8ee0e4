#include "omnizoom/service.hpp"

#include <httplib.h>

#include <charconv>
#include <cstdio>
#include <iostream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "omnizoom/metrics.hpp"
#include "omnizoom/serialization.hpp"
#include "omnizoom/warp.hpp"

namespace omnizoom {

std::size_t PanoramaStore::load_directory(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::io_error, "not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) add(f.stem().string(), read_png(f, AspectPolicy::any), f);
  return files.size();
}

std::shared_ptr<const PanoramaHandle> PanoramaStore::add(std::string id, ErpImage image,
                                                         std::filesystem::path source) {
  auto handle = std::make_shared<PanoramaHandle>();
  handle->id = id;
  handle->height = image.height();
  handle->width = image.width();
  handle->source = std::move(source);
  handle->image = std::make_shared<const ErpImage>(std::move(image));
  std::lock_guard lock(mutex_);
  if (!entries_.emplace(id, handle).second) {
    throw Error(ErrorCode::invalid_argument, "duplicate panorama id '" + id + "'");
  }
  return handle;
}

std::shared_ptr<const PanoramaHandle> PanoramaStore::add_upload(ErpImage image) {
  std::string id;
  {
    std::lock_guard lock(mutex_);
    do {
      id = fmt::format("upload-{}", next_upload_++);
    } while (entries_.count(id) != 0);
    // Reserve the id while we build the handle outside the lock.
    entries_.emplace(id, nullptr);
  }
  auto handle = std::make_shared<PanoramaHandle>();
  handle->id = id;
  handle->height = image.height();
  handle->width = image.width();
  handle->image = std::make_shared<const ErpImage>(std::move(image));
  std::lock_guard lock(mutex_);
  entries_[id] = handle;
  return handle;
}

std::shared_ptr<const PanoramaHandle> PanoramaStore::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : it->second;
}

std::vector<std::shared_ptr<const PanoramaHandle>> PanoramaStore::list() const {
  std::lock_guard lock(mutex_);
  std::vector<std::shared_ptr<const PanoramaHandle>> out;
  for (const auto& [id, handle] : entries_) {
    if (handle) out.push_back(handle);
  }
  return out;
}

namespace {

HttpResult json_result(int status, const nlohmann::ordered_json& body) {
  return {status, "application/json", body.dump(), {}};
}

HttpResult error_result(int status, const std::string& message) {
  return json_result(status, {{"error", message}});
}

struct BadRequest {
  int status;
  std::string message;
};

const std::string* find_param(const QueryParams& params, const std::string& key) {
  const auto it = params.find(key);
  return it == params.end() ? nullptr : &it->second;
}

double number_param(const QueryParams& params, const std::string& key, double fallback) {
  const std::string* v = find_param(params, key);
  if (v == nullptr) return fallback;
  try {
    const auto values = parse_floats(*v);
    if (values.size() != 1) throw Error(ErrorCode::invalid_argument, "expected one number");
    return values.front();
  } catch (const Error&) {
    throw BadRequest{400, "parameter '" + key + "' is not a number"};
  }
}

Index int_param(const QueryParams& params, const std::string& key, Index fallback) {
  const std::string* v = find_param(params, key);
  if (v == nullptr) return fallback;
  long long out = 0;
  const auto [end, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || end != v->data() + v->size()) {
    throw BadRequest{400, "parameter '" + key + "' is not an integer"};
  }
  return static_cast<Index>(out);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

ServiceHandlers::ServiceHandlers(std::shared_ptr<PanoramaStore> store, ServiceConfig config)
    : store_(std::move(store)), config_(config) {}

HttpResult ServiceHandlers::list_panoramas() const {
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const auto& p : store_->list()) list.push_back({{"id", p->id}, {"width", p->width}, {"height", p->height}});
  return json_result(200, list);
}

HttpResult ServiceHandlers::upload_panorama(const std::string& png_bytes) const {
  try {
    const auto* data = reinterpret_cast<const std::uint8_t*>(png_bytes.data());
    ErpImage image = decode_png({data, png_bytes.size()}, AspectPolicy::any);
    const auto handle = store_->add_upload(std::move(image));
    return json_result(200, {{"id", handle->id}, {"width", handle->width}, {"height", handle->height}});
  } catch (const Error& e) {
    return error_result(400, e.what());
  }
}

HttpResult ServiceHandlers::warp(const QueryParams& params) const {
  try {
    const std::string* id = find_param(params, "id");
    if (id == nullptr) return error_result(400, "missing parameter 'id'");
    const auto handle = store_->find(*id);
    if (!handle) return error_result(404, "unknown panorama '" + *id + "'");

    const Index w = int_param(params, "w", handle->width);
    const Index h = int_param(params, "h", handle->height);
    if (h < 2 || w < 4) return error_result(400, "output needs h >= 2 and w >= 4");
    if (w > config_.max_pixels || h > config_.max_pixels || w * h > config_.max_pixels) {
      return error_result(413, fmt::format("w*h exceeds {} pixels", config_.max_pixels));
    }

    const std::string* kernel_name = find_param(params, "kernel");
    const ResampleKernel kernel = kernel_name ? parse_kernel(*kernel_name) : ResampleKernel::spherical;
    const Index depth_bits = int_param(params, "depth", 8);
    if (depth_bits != 8 && depth_bits != 16) return error_result(400, "depth must be 8 or 16");

    static const char* kControlKeys[] = {"yaw", "pitch", "zoom", "zoom_center_theta", "zoom_center_phi"};
    const std::string* matrix_text = find_param(params, "matrix");
    std::string view_key;
    Mobiusd sampling;
    if (matrix_text != nullptr) {
      for (const char* key : kControlKeys) {
        if (params.count(key) != 0) return error_result(400, "give either matrix or view controls, not both");
      }
      try {
        sampling = parse_matrix(*matrix_text);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::near_singular) return error_result(422, e.what());
        return error_result(400, e.what());
      }
      view_key = "matrix=" + format_matrix(sampling);
    } else {
      ViewControlsd v;
      v.yaw = number_param(params, "yaw", 0);
      v.pitch = number_param(params, "pitch", 0);
      v.zoom_factor = number_param(params, "zoom", 1);
      if (!(v.zoom_factor > 0)) return error_result(400, "zoom must be > 0");
      if (params.count("zoom_center_theta") || params.count("zoom_center_phi")) {
        v.zoom_center = SphericalCoordd(number_param(params, "zoom_center_theta", 0),
                                        number_param(params, "zoom_center_phi", 0));
      } else {
        ViewControlsd rotation = v;
        rotation.zoom_factor = 1;
        v.zoom_center = sp_inv(map_sphere(from_controls(rotation), sp(SphericalCoordd(0, 0))));
      }
      sampling = sampling_matrix(v);
      view_key = fmt::format("controls={},{},{},{},{}", v.yaw, v.pitch, v.zoom_factor, v.zoom_center.theta,
                             v.zoom_center.phi);
    }

    const ErpImage out = warp_to(*handle->image, sampling, h, w, kernel, {SlerpWeighting::normalized, config_.threads});
    HttpResult result{200, "image/png", encode_png(out, static_cast<BitDepth>(depth_bits)), {}};
    const std::string key = fmt::format("{}|{}x{}|{}|{}|{}", *id, w, h, to_string(kernel), depth_bits, view_key);
    result.headers["Cache-Control"] = "public, max-age=86400, immutable";
    result.headers["ETag"] = fmt::format("\"{:016x}\"", fnv1a(key));
    return result;
  } catch (const BadRequest& e) {
    return error_result(e.status, e.message);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::near_singular) return error_result(422, e.what());
    return error_result(400, e.what());
  }
}

HttpResult ServiceHandlers::metrics(const QueryParams& params) const {
  try {
    const std::string* id = find_param(params, "id");
    const std::string* ref_id = find_param(params, "ref_id");
    if (id == nullptr || ref_id == nullptr) return error_result(400, "need 'id' and 'ref_id'");
    const auto a = store_->find(*id);
    const auto b = store_->find(*ref_id);
    if (!a || !b) return error_result(404, "unknown panorama id");

    const std::string* metric = find_param(params, "metric");
    const std::string name = metric ? *metric : "ws-psnr";
    const double peak = number_param(params, "peak", 1.0);
    if (!(peak > 0)) return error_result(400, "peak must be > 0");

    MetricReport report;
    report.peak = peak;
    report.height = a->height;
    report.width = a->width;
    report.channels = a->image->channels();
    if (name == "ws-psnr" || name == "ws_psnr") {
      report.metric = "ws_psnr";
      report.value = ws_psnr(*a->image, *b->image, peak);
    } else if (name == "ws-ssim" || name == "ws_ssim") {
      report.metric = "ws_ssim";
      report.value = ws_ssim(*a->image, *b->image, peak);
    } else {
      return error_result(400, "metric must be ws-psnr or ws-ssim");
    }
    return json_result(200, to_json(report));
  } catch (const BadRequest& e) {
    return error_result(e.status, e.message);
  } catch (const Error& e) {
    return error_result(e.code() == ErrorCode::dim_mismatch || e.code() == ErrorCode::too_small ? 422 : 400,
                        e.what());
  }
}

namespace {

void send(httplib::Response& res, const HttpResult& r) {
  res.status = r.status;
  for (const auto& [k, v] : r.headers) res.set_header(k, v);
  res.set_content(r.body, r.content_type);
}

}  // namespace

Service::Service(std::shared_ptr<PanoramaStore> store, ServiceConfig config)
    : server_(std::make_unique<httplib::Server>()), handlers_(std::move(store), config) {
  const int workers = std::max(1, config.request_workers);
  server_->new_task_queue = [workers] { return new httplib::ThreadPool(workers); };
  server_->set_read_timeout(config.read_timeout_s, 0);
  server_->set_write_timeout(config.write_timeout_s, 0);
  server_->set_payload_max_length(config.max_upload_bytes);

  server_->Get("/api/panoramas", [this](const httplib::Request&, httplib::Response& res) {
    send(res, handlers_.list_panoramas());
  });
  server_->Post("/api/panoramas", [this](const httplib::Request& req, httplib::Response& res) {
    if (req.is_multipart_form_data()) {
      if (!req.has_file("file")) {
        send(res, error_result(400, "multipart upload needs a 'file' field"));
        return;
      }
      send(res, handlers_.upload_panorama(req.get_file_value("file").content));
      return;
    }
    send(res, handlers_.upload_panorama(req.body));
  });
  server_->Get("/api/warp", [this](const httplib::Request& req, httplib::Response& res) {
    send(res, handlers_.warp(req.params));
  });
  server_->Get("/api/metrics", [this](const httplib::Request& req, httplib::Response& res) {
    send(res, handlers_.metrics(req.params));
  });
}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool Service::listen_after_bind() { return server_->listen_after_bind(); }

void Service::stop() {
  if (server_) server_->stop();
}

int serve(const ServeOptions& options) {
  auto store = std::make_shared<PanoramaStore>();
  try {
    const std::size_t loaded = store->load_directory(options.panorama_dir);
    std::cout << "loaded " << loaded << " panorama(s) from " << options.panorama_dir << '\n';
  } catch (const std::exception& e) {
    std::cerr << "serve: " << e.what() << '\n';
    return 1;
  }
  Service service(store, options.config);
  const int port = service.bind(options.host, options.port);
  if (port < 0) {
    std::cerr << "serve: cannot bind " << options.host << ':' << options.port << '\n';
    return 1;
  }
  std::cout << "listening on " << options.host << ':' << port << std::endl;
  return service.listen_after_bind() ? 0 : 1;
}

}  // namespace omnizoom
