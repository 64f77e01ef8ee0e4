#pragma once

// HTTP front end for interactive viewing.
//
//   GET  /api/panoramas                 -> [{id, width, height}]
//   POST /api/panoramas                 multipart field "file" (or a raw PNG body) -> {id, width, height}
//   GET  /api/warp?id&w&h&kernel&...    -> PNG
//        view by controls: yaw, pitch, zoom, zoom_center_theta, zoom_center_phi
//          (content motion; sampled through the inverse, like the CLI's --yaw/--pitch/--zoom)
//        or by matrix=8 comma floats (used directly as the sampling transform)
//   GET  /api/metrics?id&ref_id&metric  -> {metric, value, peak, dims}
//
// Errors are JSON {"error": message}: 400 bad parameters, 404 unknown id,
// 413 when w * h exceeds the pixel budget, 422 for a near-singular matrix.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "omnizoom/image.hpp"
#include "omnizoom/png_io.hpp"

namespace httplib {
class Server;
}

namespace omnizoom {

struct PanoramaHandle {
  std::string id;
  Index height = 0;
  Index width = 0;
  std::filesystem::path source;
  std::shared_ptr<const ErpImage> image;
};

/// Write-once-read-many store: entries are never replaced or mutated.
class PanoramaStore {
 public:
  /// Loads every PNG in `dir`; ids are file stems. Returns the number loaded.
  std::size_t load_directory(const std::filesystem::path& dir);

  /// Throws invalid_argument if the id already exists.
  std::shared_ptr<const PanoramaHandle> add(std::string id, ErpImage image, std::filesystem::path source = {});

  /// Stores under a fresh "upload-N" id.
  std::shared_ptr<const PanoramaHandle> add_upload(ErpImage image);

  std::shared_ptr<const PanoramaHandle> find(const std::string& id) const;
  std::vector<std::shared_ptr<const PanoramaHandle>> list() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const PanoramaHandle>> entries_;
  std::uint64_t next_upload_ = 1;
};

struct ServiceConfig {
  int threads = 0;                          // per-request warp parallelism
  int request_workers = 8;                  // concurrent HTTP handlers
  Index max_pixels = 8'388'608;             // w * h budget per request
  int read_timeout_s = 5;
  int write_timeout_s = 30;
  std::size_t max_upload_bytes = 256u << 20;
};

struct HttpResult {
  int status = 200;
  std::string content_type;
  std::string body;
  std::map<std::string, std::string> headers;
};

using QueryParams = std::multimap<std::string, std::string>;

/// Route logic, independent of the transport so it can be exercised directly.
class ServiceHandlers {
 public:
  ServiceHandlers(std::shared_ptr<PanoramaStore> store, ServiceConfig config);

  HttpResult list_panoramas() const;
  HttpResult upload_panorama(const std::string& png_bytes) const;
  HttpResult warp(const QueryParams& params) const;
  HttpResult metrics(const QueryParams& params) const;

 private:
  std::shared_ptr<PanoramaStore> store_;
  ServiceConfig config_;
};

class Service {
 public:
  Service(std::shared_ptr<PanoramaStore> store, ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds host:port; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  bool listen_after_bind();
  void stop();

 private:
  std::unique_ptr<httplib::Server> server_;
  ServiceHandlers handlers_;
};

struct ServeOptions {
  int port = 8080;
  std::string host = "0.0.0.0";
  std::filesystem::path panorama_dir;
  ServiceConfig config;
};

/// Loads the panorama directory and serves until the process is stopped.
/// Returns a nonzero exit code on startup failure.
int serve(const ServeOptions& options);

}  // namespace omnizoom
