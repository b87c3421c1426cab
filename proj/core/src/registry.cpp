#include "guidepost/registry.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "guidepost/error.hpp"
#include "guidepost/hashing.hpp"

namespace guidepost {

namespace fs = std::filesystem;

namespace {

// Ids are 16 lowercase hex digits; anything else could escape the root.
bool valid_id(std::string_view id) {
  if (id.size() != 16) return false;
  for (char c : id) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::not_found, "cannot open " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return std::move(out).str();
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  fs::create_directories(path.parent_path());
  std::random_device rd;
  const fs::path tmp = path.string() + ".tmp" + to_hex((std::uint64_t{rd()} << 32) | rd()).substr(8);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::internal, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::internal, "short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

Registry::Registry(fs::path root) : root_(std::move(root)) {}

fs::path Registry::dataset_dir(std::string_view id) const {
  if (!valid_id(id)) fail(ErrorCode::not_found, "unknown dataset " + std::string(id));
  return root_ / "datasets" / std::string(id);
}

fs::path Registry::session_path(std::string_view sid) const {
  if (!valid_id(sid)) fail(ErrorCode::not_found, "unknown session " + std::string(sid));
  return root_ / "sessions" / (std::string(sid) + ".json");
}

std::shared_ptr<const Dataset> Registry::ingest(std::string_view bytes, const CsvOptions& options) {
  auto dataset = std::make_shared<const Dataset>(ingest_csv(bytes, options));
  const auto dir = dataset_dir(dataset->id());
  if (!fs::exists(dir / "meta.json")) {
    write_file_atomic(dir / "source.csv", bytes);
    nlohmann::ordered_json meta;
    meta["dataset_id"] = dataset->id();
    meta["delimiter"] = std::string(1, options.delimiter);
    meta["header"] = options.header;
    meta["rows"] = dataset->rows();
    meta["columns"] = dataset->cols();
    write_file_atomic(dir / "meta.json", meta.dump(2) + "\n");
  }
  return dataset;
}

bool Registry::has_dataset(std::string_view id) const {
  return valid_id(id) && fs::exists(dataset_dir(id) / "meta.json");
}

std::shared_ptr<const Dataset> Registry::load_dataset(std::string_view id) const {
  if (!has_dataset(id)) fail(ErrorCode::not_found, "unknown dataset " + std::string(id));
  const auto dir = dataset_dir(id);
  CsvOptions options;
  try {
    const auto meta = nlohmann::json::parse(read_file(dir / "meta.json"));
    const auto delim = meta.at("delimiter").get<std::string>();
    if (delim.size() != 1) fail(ErrorCode::corrupt, "bad delimiter in registry metadata");
    options.delimiter = delim[0];
    options.header = meta.at("header").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::corrupt, std::string("bad registry metadata: ") + e.what());
  }
  auto dataset = std::make_shared<const Dataset>(ingest_csv(read_file(dir / "source.csv"), options));
  if (dataset->id() != id) fail(ErrorCode::corrupt, "registry source does not match dataset id " + std::string(id));
  return dataset;
}

std::vector<std::string> Registry::list_datasets() const {
  std::vector<std::string> out;
  const auto dir = root_ / "datasets";
  if (!fs::exists(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    auto name = entry.path().filename().string();
    if (has_dataset(name)) out.push_back(std::move(name));
  }
  std::sort(out.begin(), out.end());
  return out;
}

fs::path Registry::bundle_path(std::string_view id) const { return dataset_dir(id) / "bundle.bin"; }

void Registry::save_bundle(const sketch::SketchBundle& bundle) const {
  if (!has_dataset(bundle.fingerprint)) fail(ErrorCode::not_found, "unknown dataset " + bundle.fingerprint);
  write_file_atomic(bundle_path(bundle.fingerprint), sketch::serialize(bundle));
}

std::optional<sketch::SketchBundle> Registry::load_bundle(std::string_view id) const {
  const auto path = bundle_path(id);
  if (!fs::exists(path)) return std::nullopt;
  return sketch::deserialize_bundle(read_file(path));
}

std::string Registry::new_session_id() const {
  std::random_device rd;
  for (;;) {
    auto sid = to_hex((std::uint64_t{rd()} << 32) | rd());
    if (!fs::exists(session_path(sid))) return sid;
  }
}

void Registry::save_session(std::string_view sid, std::string_view text) const {
  write_file_atomic(session_path(sid), text);
}

std::optional<std::string> Registry::load_session(std::string_view sid) const {
  if (!valid_id(sid)) return std::nullopt;
  const auto path = session_path(sid);
  if (!fs::exists(path)) return std::nullopt;
  return read_file(path);
}

}  // namespace guidepost
