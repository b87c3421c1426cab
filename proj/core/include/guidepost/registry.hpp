#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "guidepost/dataset.hpp"
#include "guidepost/sketch/bundle.hpp"

namespace guidepost {

/// Directory shared by the CLI and the service:
///
///   <root>/datasets/<id>/source.csv   raw bytes as ingested
///   <root>/datasets/<id>/meta.json    parse options
///   <root>/datasets/<id>/bundle.bin   serialized sketch bundle, once built
///   <root>/sessions/<sid>.json        saved session state
///
/// Dataset ids are content fingerprints, so re-ingesting the same bytes with
/// the same options is a no-op. Files are replaced atomically.
class Registry {
 public:
  explicit Registry(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }

  std::shared_ptr<const Dataset> ingest(std::string_view bytes, const CsvOptions& options);
  bool has_dataset(std::string_view id) const;
  /// Throws not_found for unknown ids.
  std::shared_ptr<const Dataset> load_dataset(std::string_view id) const;
  std::vector<std::string> list_datasets() const;

  std::filesystem::path bundle_path(std::string_view id) const;
  void save_bundle(const sketch::SketchBundle& bundle) const;
  /// nullopt when no bundle was built yet; throws corrupt on a damaged file.
  std::optional<sketch::SketchBundle> load_bundle(std::string_view id) const;

  std::string new_session_id() const;
  void save_session(std::string_view sid, std::string_view text) const;
  std::optional<std::string> load_session(std::string_view sid) const;

 private:
  std::filesystem::path dataset_dir(std::string_view id) const;
  std::filesystem::path session_path(std::string_view sid) const;

  std::filesystem::path root_;
};

/// Reads a whole file; throws not_found when it cannot be opened.
std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace guidepost
