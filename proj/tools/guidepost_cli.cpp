// guidepost: ingest, sketch and query datasets in a registry directory.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "guidepost/engine.hpp"
#include "guidepost/error.hpp"
#include "guidepost/json_io.hpp"
#include "guidepost/registry.hpp"
#include "guidepost/service.hpp"
#include "guidepost/sketch/bundle.hpp"

namespace {

using namespace guidepost;

std::string default_registry() {
  const char* env = std::getenv("GUIDEPOST_REGISTRY");
  return env != nullptr && *env != '\0' ? env : "guidepost-registry";
}

struct ModeFlags {
  bool exact = false;
  bool approx = false;

  void add(CLI::App* cmd) {
    auto* e = cmd->add_flag("--exact", exact, "Evaluate metrics on the full data");
    auto* a = cmd->add_flag("--approx", approx, "Evaluate metrics from the sketch bundle (default)");
    e->excludes(a);
  }
  void apply(Params& params) const {
    if (exact) params["mode"] = "exact";
    if (approx) params["mode"] = "approximate";
  }
};

void put(Params& params, const char* name, const std::optional<std::string>& value) {
  if (value) params[name] = *value;
}

std::optional<sketch::SketchBundle> bundle_for(const Registry& registry, const std::string& id, Mode mode) {
  if (mode == Mode::exact) return std::nullopt;
  auto b = registry.load_bundle(id);
  if (!b) fail(ErrorCode::bundle_not_ready, "no sketch bundle for " + id + "; run `guidepost sketch " + id + "`");
  return b;
}

const sketch::SketchBundle* ptr(const std::optional<sketch::SketchBundle>& b) { return b ? &*b : nullptr; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rank statistical guideposts over tabular data"};
  app.require_subcommand(1);
  std::string registry_dir = default_registry();
  app.add_option("--registry", registry_dir, "Registry directory (env GUIDEPOST_REGISTRY)");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Parse a CSV file into the registry");
  std::string file;
  std::string delimiter = ",";
  bool no_header = false;
  ingest->add_option("file", file, "CSV/TSV file")->required()->check(CLI::ExistingFile);
  ingest->add_option("--out", registry_dir, "Registry directory");
  ingest->add_option("--delimiter", delimiter, "Field delimiter (single character or 'tab')");
  ingest->add_flag("--no-header", no_header, "First row holds data, not column names");

  // sketch
  auto* sketch_cmd = app.add_subcommand("sketch", "Build and persist the sketch bundle of a dataset");
  std::string dataset_id;
  sketch::SketchConfig config;
  sketch_cmd->add_option("dataset", dataset_id, "Dataset id")->required();
  sketch_cmd->add_option("--k", config.k, "Hyperplane signature bits (multiple of 64)")->capture_default_str();
  sketch_cmd->add_option("--epsilon", config.epsilon, "Quantile rank error")->capture_default_str();
  sketch_cmd->add_option("--seed", config.seed, "Hashing and hyperplane seed")->capture_default_str();
  sketch_cmd->add_option("--s", config.heavy_hitters, "Heavy-hitter counters")->capture_default_str();
  sketch_cmd->add_option("--r", config.reservoir, "Reservoir sample size")->capture_default_str();
  sketch_cmd->add_flag("--retain-projections", config.retain_projections,
                       "Keep mergeable projection state in the bundle");

  // rank
  auto* rank = app.add_subcommand("rank", "Top guideposts of one descriptor");
  std::optional<std::string> descriptor, metric, order, k, min, max, alpha;
  ModeFlags rank_mode;
  rank->add_option("dataset", dataset_id, "Dataset id")->required();
  rank->add_option("--descriptor", descriptor, "Descriptor kind")->required();
  rank->add_option("--metric", metric, "Ranking metric");
  rank->add_option("--order", order, "ascending or descending");
  rank->add_option("--k", k, "Number of guideposts");
  rank->add_option("--min", min, "Lower bound on strength");
  rank->add_option("--max", max, "Upper bound on strength");
  rank->add_option("--alpha", alpha, "Significance level for significance_adjusted_pearson");
  rank_mode.add(rank);

  // related
  auto* related = app.add_subcommand("related", "Neighborhood of a guidepost");
  std::string focus;
  ModeFlags related_mode;
  related->add_option("dataset", dataset_id, "Dataset id")->required();
  related->add_option("--focus", focus, "Guidepost id")->required();
  related->add_option("--k", k, "Guideposts per list");
  related_mode.add(related);

  // overview
  auto* overview_cmd = app.add_subcommand("overview", "Strength of every instance of a descriptor");
  ModeFlags overview_mode;
  overview_cmd->add_option("dataset", dataset_id, "Dataset id")->required();
  overview_cmd->add_option("--descriptor", descriptor, "Descriptor kind")->required();
  overview_mode.add(overview_cmd);

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  std::string addr = "127.0.0.1:8080";
  serve->add_option("--addr", addr, "Listen address host:port")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    Registry registry(registry_dir);

    if (*ingest) {
      CsvOptions options;
      if (delimiter == "tab" || delimiter == "\\t") {
        options.delimiter = '\t';
      } else if (delimiter.size() == 1) {
        options.delimiter = delimiter[0];
      } else {
        fail(ErrorCode::invalid_argument, "delimiter must be a single character");
      }
      options.header = !no_header;
      auto ds = registry.ingest(read_file(file), options);
      std::cout << render(columns_json(*ds));
      return 0;
    }

    if (*sketch_cmd) {
      auto ds = registry.load_dataset(dataset_id);
      const auto start = std::chrono::steady_clock::now();
      const auto bundle = sketch::build_bundle(*ds, config);
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      registry.save_bundle(bundle);
      Json doc;
      doc["dataset_id"] = ds->id();
      doc["path"] = registry.bundle_path(ds->id()).string();
      doc["bundle_bytes"] = sketch::serialize(bundle).size();
      doc["build_seconds"] = elapsed.count();
      std::cout << render(doc);
      return 0;
    }

    if (*rank) {
      Params params;
      put(params, "descriptor", descriptor);
      put(params, "metric", metric);
      put(params, "order", order);
      put(params, "k", k);
      put(params, "min", min);
      put(params, "max", max);
      put(params, "alpha", alpha);
      rank_mode.apply(params);
      const auto query = parse_guidepost_query(params);
      auto ds = registry.load_dataset(dataset_id);
      const auto bundle = bundle_for(registry, dataset_id, query.mode);
      std::cout << render(guideposts_json(*ds, query, rank_guideposts(*ds, ptr(bundle), query)));
      return 0;
    }

    if (*related) {
      Params params;
      put(params, "k", k);
      related_mode.apply(params);
      const auto query = parse_neighborhood_query(params);
      auto ds = registry.load_dataset(dataset_id);
      const auto ref = resolve_guidepost_id(*ds, focus);
      if (!ref) fail(ErrorCode::not_found, "unknown guidepost " + focus);
      const auto bundle = bundle_for(registry, dataset_id, query.mode);
      std::cout << render(to_json(*ds, related_guideposts(*ds, ptr(bundle), *ref, query), query));
      return 0;
    }

    if (*overview_cmd) {
      Params params;
      put(params, "descriptor", descriptor);
      overview_mode.apply(params);
      const auto [kind, mode] = parse_overview_query(params);
      auto ds = registry.load_dataset(dataset_id);
      const auto bundle = bundle_for(registry, dataset_id, mode);
      std::cout << render(to_json(*ds, overview(*ds, ptr(bundle), kind, mode)));
      return 0;
    }

    if (*serve) {
      auto colon = addr.rfind(':');
      if (colon == std::string::npos) fail(ErrorCode::invalid_argument, "address must be host:port");
      const std::string host = addr.substr(0, colon);
      const int port = std::stoi(addr.substr(colon + 1));
      auto cfg = ServiceConfig::from_env();
      cfg.registry = registry_dir;
      Service service(cfg);
      std::cerr << "guidepost: serving " << registry_dir << " on " << addr << "\n";
      if (!service.listen(host, port)) fail(ErrorCode::internal, "cannot listen on " + addr);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "guidepost: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "guidepost: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
