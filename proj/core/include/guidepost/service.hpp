#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include "guidepost/json_io.hpp"
#include "guidepost/sketch/bundle.hpp"

namespace guidepost {

inline constexpr std::uint64_t kDefaultMaxUploadBytes = std::uint64_t{1} << 30;

struct ServiceConfig {
  std::filesystem::path registry = "guidepost-registry";
  std::uint64_t max_upload_bytes = kDefaultMaxUploadBytes;
  sketch::SketchConfig sketch;
  /// Build missing bundles on a background thread. When off, approximate
  /// queries answer 409 until a bundle appears in the registry.
  bool build_bundles = true;

  /// Defaults overridden by GUIDEPOST_REGISTRY, GUIDEPOST_MAX_UPLOAD_BYTES,
  /// GUIDEPOST_SKETCH_K, GUIDEPOST_SKETCH_EPSILON, GUIDEPOST_SKETCH_SEED,
  /// GUIDEPOST_SKETCH_S and GUIDEPOST_SKETCH_R.
  static ServiceConfig from_env();
};

struct HttpRequest {
  std::string method;
  std::string path;
  Params params;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string body;
};

enum class BundleStatus { missing, building, ready, failed };
std::string_view to_string(BundleStatus status);

/// HTTP status for an error code.
int http_status(ErrorCode code);

/// Routes requests to the engine. `handle` is transport independent and
/// thread safe; `listen` serves it over HTTP/1.1.
class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  HttpResponse handle(const HttpRequest& request);

  BundleStatus bundle_status(std::string_view dataset_id);
  /// Blocks until no bundle build is queued or running.
  void wait_for_bundles();

  /// Serves until stop(). Returns false when the address cannot be bound.
  bool listen(const std::string& host, int port);
  /// Binds an ephemeral port and serves on a background thread.
  int listen_in_background(const std::string& host);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace guidepost
