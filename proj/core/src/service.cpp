#include "guidepost/service.hpp"

#include <charconv>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <iostream>
#include <mutex>
#include <shared_mutex>
#include <thread>
#include <unordered_map>

#include <httplib.h>

#include "guidepost/engine.hpp"
#include "guidepost/error.hpp"
#include "guidepost/registry.hpp"
#include "guidepost/session.hpp"

namespace guidepost {

std::string_view to_string(BundleStatus status) {
  switch (status) {
    case BundleStatus::missing: return "missing";
    case BundleStatus::building: return "building";
    case BundleStatus::ready: return "ready";
    case BundleStatus::failed: return "failed";
  }
  return "unknown";
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::parse_error:
    case ErrorCode::corrupt:
      return 400;
    case ErrorCode::not_found:
      return 404;
    case ErrorCode::stale_bundle:
    case ErrorCode::bundle_not_ready:
      return 409;
    case ErrorCode::too_large:
      return 413;
    case ErrorCode::incomparable:
    case ErrorCode::internal:
      return 500;
  }
  return 500;
}

namespace {

template <class T>
void env_number(const char* name, T& out) {
  const char* text = std::getenv(name);
  if (text == nullptr || *text == '\0') return;
  std::string_view s(text);
  T v{};
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    fail(ErrorCode::invalid_argument, std::string("invalid value for ") + name + ": " + text);
  }
  out = v;
}

HttpResponse json_response(int status, const Json& doc) { return {status, render(doc)}; }

HttpResponse error_response(int status, std::string_view code, std::string_view message) {
  return json_response(status, error_json(status, code, message));
}

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> out;
  while (!path.empty()) {
    if (path.front() == '/') {
      path.remove_prefix(1);
      continue;
    }
    auto end = path.find('/');
    out.push_back(path.substr(0, end));
    if (end == std::string_view::npos) break;
    path.remove_prefix(end);
  }
  return out;
}

void no_params(const Params& params) {
  if (!params.empty()) fail(ErrorCode::invalid_argument, "unknown parameter " + params.begin()->first);
}

}  // namespace

ServiceConfig ServiceConfig::from_env() {
  ServiceConfig c;
  if (const char* r = std::getenv("GUIDEPOST_REGISTRY"); r != nullptr && *r != '\0') c.registry = r;
  env_number("GUIDEPOST_MAX_UPLOAD_BYTES", c.max_upload_bytes);
  env_number("GUIDEPOST_SKETCH_K", c.sketch.k);
  env_number("GUIDEPOST_SKETCH_EPSILON", c.sketch.epsilon);
  env_number("GUIDEPOST_SKETCH_SEED", c.sketch.seed);
  env_number("GUIDEPOST_SKETCH_S", c.sketch.heavy_hitters);
  env_number("GUIDEPOST_SKETCH_R", c.sketch.reservoir);
  c.sketch.validate();
  return c;
}

struct Service::Impl {
  explicit Impl(ServiceConfig c) : config(std::move(c)), registry(config.registry) {
    config.sketch.validate();
    worker = std::thread([this] { build_loop(); });
  }

  ~Impl() {
    stop_server();
    {
      std::lock_guard lock(queue_mu);
      stopping = true;
    }
    queue_cv.notify_all();
    worker.join();
  }

  // --- datasets and bundles ---

  std::shared_ptr<const Dataset> dataset(std::string_view id) {
    {
      std::shared_lock lock(mu);
      if (auto it = datasets.find(std::string(id)); it != datasets.end()) return it->second;
    }
    auto loaded = registry.load_dataset(id);
    std::unique_lock lock(mu);
    return datasets.emplace(std::string(id), std::move(loaded)).first->second;
  }

  BundleStatus status_of(const std::string& id) {
    std::shared_lock lock(mu);
    auto it = status.find(id);
    return it == status.end() ? BundleStatus::missing : it->second;
  }

  // Ready bundle for `id`, or nullptr while one is being built.
  std::shared_ptr<const sketch::SketchBundle> bundle(const std::string& id) {
    {
      std::shared_lock lock(mu);
      if (auto it = bundles.find(id); it != bundles.end()) return it->second;
      if (auto it = status.find(id); it != status.end() && it->second != BundleStatus::missing) return nullptr;
    }
    try {
      if (auto stored = registry.load_bundle(id); stored && stored->fingerprint == id) {
        auto shared = std::make_shared<const sketch::SketchBundle>(std::move(*stored));
        std::unique_lock lock(mu);
        status[id] = BundleStatus::ready;
        return bundles.emplace(id, std::move(shared)).first->second;
      }
    } catch (const Error& e) {
      std::cerr << "guidepost: discarding unreadable bundle for " << id << ": " << e.what() << "\n";
    }
    enqueue_build(id);
    return nullptr;
  }

  void enqueue_build(const std::string& id) {
    {
      std::unique_lock lock(mu);
      auto& s = status[id];
      if (s == BundleStatus::building || s == BundleStatus::ready) return;
      if (!config.build_bundles) {
        s = BundleStatus::missing;
        return;
      }
      s = BundleStatus::building;
    }
    {
      std::lock_guard lock(queue_mu);
      queue.push_back(id);
    }
    queue_cv.notify_all();
  }

  void build_loop() {
    for (;;) {
      std::string id;
      {
        std::unique_lock lock(queue_mu);
        queue_cv.wait(lock, [this] { return stopping || !queue.empty(); });
        if (stopping) return;
        id = std::move(queue.front());
        queue.pop_front();
        ++active;
      }
      BundleStatus result = BundleStatus::failed;
      std::shared_ptr<const sketch::SketchBundle> built;
      try {
        auto ds = dataset(id);
        built = std::make_shared<const sketch::SketchBundle>(sketch::build_bundle(*ds, config.sketch));
        registry.save_bundle(*built);
        result = BundleStatus::ready;
      } catch (const std::exception& e) {
        std::cerr << "guidepost: bundle build for " << id << " failed: " << e.what() << "\n";
      }
      {
        std::unique_lock lock(mu);
        status[id] = result;
        if (built) bundles[id] = std::move(built);
      }
      {
        std::lock_guard lock(queue_mu);
        --active;
      }
      queue_cv.notify_all();
    }
  }

  void wait_idle() {
    std::unique_lock lock(queue_mu);
    queue_cv.wait(lock, [this] { return stopping || (queue.empty() && active == 0); });
  }

  // Bundle for an approximate query; exact queries never wait for one.
  std::shared_ptr<const sketch::SketchBundle> bundle_for(const std::string& id, Mode mode) {
    if (mode == Mode::exact) return nullptr;
    auto b = bundle(id);
    if (!b) {
      const auto s = status_of(id);
      if (s == BundleStatus::failed) fail(ErrorCode::bundle_not_ready, "bundle build failed");
      fail(ErrorCode::bundle_not_ready, "bundle building");
    }
    return b;
  }

  // --- routes ---

  HttpResponse route(const HttpRequest& req) {
    const auto seg = split_path(req.path);
    const auto& m = req.method;
    if (seg.size() == 1 && seg[0] == "datasets") {
      if (m == "POST") return post_dataset(req);
      return method_not_allowed();
    }
    if (seg.size() >= 3 && seg[0] == "datasets") {
      const std::string id(seg[1]);
      if (m != "GET") return method_not_allowed();
      if (seg.size() == 3 && seg[2] == "columns") return get_columns(id, req.params);
      if (seg.size() == 3 && seg[2] == "guideposts") return get_guideposts(id, req.params);
      if (seg.size() == 5 && seg[2] == "guideposts" && seg[4] == "related") {
        return get_related(id, std::string(seg[3]), req.params);
      }
      if (seg.size() == 3 && seg[2] == "overview") return get_overview(id, req.params);
      if (seg.size() == 3 && seg[2] == "rows") return get_rows_page(id, req.params);
    }
    if (seg.size() == 1 && seg[0] == "sessions") {
      if (m == "POST") return post_session(req);
      return method_not_allowed();
    }
    if (seg.size() == 2 && seg[0] == "sessions") {
      if (m == "GET") return get_session(std::string(seg[1]), req.params);
      if (m == "PUT") return put_session(std::string(seg[1]), req);
      return method_not_allowed();
    }
    return error_response(404, "not_found", "no such endpoint");
  }

  static HttpResponse method_not_allowed() {
    return error_response(405, "method_not_allowed", "method not allowed");
  }

  HttpResponse post_dataset(const HttpRequest& req) {
    CsvOptions options;
    for (const auto& [name, value] : req.params) {
      if (name == "delimiter") {
        if (value == "tab" || value == "\\t") {
          options.delimiter = '\t';
        } else if (value.size() == 1) {
          options.delimiter = value[0];
        } else {
          fail(ErrorCode::invalid_argument, "delimiter must be a single character");
        }
      } else if (name == "header") {
        if (value != "true" && value != "false") fail(ErrorCode::invalid_argument, "header must be true or false");
        options.header = value == "true";
      } else {
        fail(ErrorCode::invalid_argument, "unknown parameter " + name);
      }
    }
    if (req.body.size() > config.max_upload_bytes) {
      fail(ErrorCode::too_large, "dataset exceeds the configured size cap of " +
                                     std::to_string(config.max_upload_bytes) + " bytes");
    }
    auto ds = registry.ingest(req.body, options);
    {
      std::unique_lock lock(mu);
      datasets.emplace(ds->id(), ds);
    }
    bundle(ds->id());
    auto doc = columns_json(*ds);
    doc["bundle_status"] = to_string(status_of(ds->id()));
    return json_response(201, doc);
  }

  HttpResponse get_columns(const std::string& id, const Params& params) {
    no_params(params);
    auto ds = dataset(id);
    bundle(id);
    auto doc = columns_json(*ds);
    doc["bundle_status"] = to_string(status_of(id));
    return json_response(200, doc);
  }

  HttpResponse get_guideposts(const std::string& id, const Params& params) {
    auto ds = dataset(id);
    const auto query = parse_guidepost_query(params);
    auto b = bundle_for(id, query.mode);
    return json_response(200, guideposts_json(*ds, query, rank_guideposts(*ds, b.get(), query)));
  }

  HttpResponse get_related(const std::string& id, const std::string& gid, const Params& params) {
    auto ds = dataset(id);
    const auto query = parse_neighborhood_query(params);
    const auto focus = resolve_guidepost_id(*ds, gid);
    if (!focus) fail(ErrorCode::not_found, "unknown guidepost " + gid);
    auto b = bundle_for(id, query.mode);
    return json_response(200, to_json(*ds, related_guideposts(*ds, b.get(), *focus, query), query));
  }

  HttpResponse get_overview(const std::string& id, const Params& params) {
    auto ds = dataset(id);
    const auto [kind, mode] = parse_overview_query(params);
    auto b = bundle_for(id, mode);
    return json_response(200, to_json(*ds, overview(*ds, b.get(), kind, mode)));
  }

  HttpResponse get_rows_page(const std::string& id, const Params& params) {
    auto ds = dataset(id);
    const auto q = parse_row_query(*ds, params);
    std::vector<std::size_t> projection(ds->cols());
    for (std::size_t c = 0; c < projection.size(); ++c) projection[c] = c;
    return json_response(200, to_json(*ds, get_rows(*ds, q.filter, projection, q.limit, q.offset)));
  }

  HttpResponse post_session(const HttpRequest& req) {
    no_params(req.params);
    Json body;
    try {
      body = Json::parse(req.body);
    } catch (const Json::exception&) {
      fail(ErrorCode::invalid_argument, "session request body must be JSON");
    }
    if (!body.is_object() || !body.contains("dataset_id") || !body["dataset_id"].is_string() || body.size() != 1) {
      fail(ErrorCode::invalid_argument, "session request body must be {\"dataset_id\": ...}");
    }
    SessionState s;
    s.dataset_id = body["dataset_id"].get<std::string>();
    dataset(s.dataset_id);
    std::lock_guard lock(session_mu);
    const auto sid = registry.new_session_id();
    const auto text = save_session(s);
    registry.save_session(sid, text);
    Json doc;
    doc["session_id"] = sid;
    doc["session"] = Json::parse(text);
    return json_response(201, doc);
  }

  HttpResponse get_session(const std::string& sid, const Params& params) {
    no_params(params);
    std::lock_guard lock(session_mu);
    auto text = registry.load_session(sid);
    if (!text) fail(ErrorCode::not_found, "unknown session " + sid);
    return {200, save_session(load_session(*text)) + "\n"};
  }

  HttpResponse put_session(const std::string& sid, const HttpRequest& req) {
    no_params(req.params);
    auto state = load_session(req.body);
    auto ds = dataset(state.dataset_id);
    validate_session(state, *ds);
    std::lock_guard lock(session_mu);
    if (!registry.load_session(sid)) fail(ErrorCode::not_found, "unknown session " + sid);
    const auto text = save_session(state);
    registry.save_session(sid, text);
    return {200, text + "\n"};
  }

  HttpResponse handle(const HttpRequest& req) {
    try {
      return route(req);
    } catch (const Error& e) {
      const int code = http_status(e.code());
      return error_response(code, to_string(e.code()), e.what());
    } catch (const std::exception& e) {
      return error_response(500, "internal", e.what());
    }
  }

  // --- transport ---

  void configure_server() {
    server.set_payload_max_length(static_cast<std::size_t>(config.max_upload_bytes));
    auto adapt = [this](const httplib::Request& in, httplib::Response& out) {
      HttpRequest req;
      req.method = in.method;
      req.path = in.path;
      for (const auto& [name, value] : in.params) {
        if (!req.params.emplace(name, value).second) {
          const auto r = error_response(400, "invalid_argument", "duplicate parameter " + name);
          out.status = r.status;
          out.set_content(r.body, "application/json");
          return;
        }
      }
      if (in.is_multipart_form_data()) {
        if (in.files.empty()) {
          const auto r = error_response(400, "invalid_argument", "multipart upload without a file part");
          out.status = r.status;
          out.set_content(r.body, "application/json");
          return;
        }
        req.body = in.files.begin()->second.content;
      } else {
        req.body = in.body;
      }
      const auto r = handle(req);
      out.status = r.status;
      out.set_content(r.body, "application/json");
    };
    server.Get(".*", adapt);
    server.Post(".*", adapt);
    server.Put(".*", adapt);
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return;
      const std::string code = res.status == 413 ? "too_large" : res.status == 404 ? "not_found" : "http_error";
      const auto r = error_response(res.status, code, httplib::status_message(res.status));
      res.set_content(r.body, "application/json");
    });
  }

  void stop_server() {
    if (server.is_running()) server.stop();
    if (server_thread.joinable()) server_thread.join();
  }

  ServiceConfig config;
  Registry registry;

  std::shared_mutex mu;
  std::unordered_map<std::string, std::shared_ptr<const Dataset>> datasets;
  std::unordered_map<std::string, std::shared_ptr<const sketch::SketchBundle>> bundles;
  std::unordered_map<std::string, BundleStatus> status;

  std::mutex queue_mu;
  std::condition_variable queue_cv;
  std::deque<std::string> queue;
  int active = 0;
  bool stopping = false;
  std::thread worker;

  std::mutex session_mu;

  httplib::Server server;
  std::thread server_thread;
  bool configured = false;
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}
Service::~Service() = default;

HttpResponse Service::handle(const HttpRequest& request) { return impl_->handle(request); }

BundleStatus Service::bundle_status(std::string_view dataset_id) {
  return impl_->status_of(std::string(dataset_id));
}

void Service::wait_for_bundles() { impl_->wait_idle(); }

bool Service::listen(const std::string& host, int port) {
  if (!impl_->configured) {
    impl_->configure_server();
    impl_->configured = true;
  }
  return impl_->server.listen(host, port);
}

int Service::listen_in_background(const std::string& host) {
  if (!impl_->configured) {
    impl_->configure_server();
    impl_->configured = true;
  }
  const int port = impl_->server.bind_to_any_port(host);
  if (port <= 0) fail(ErrorCode::internal, "cannot bind " + host);
  impl_->server_thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void Service::stop() { impl_->stop_server(); }

}  // namespace guidepost
