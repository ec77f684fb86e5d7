#pragma once

#include <filesystem>
#include <string>

#include "lmv/core/json_io.hpp"

namespace lmv {

/// An output directory plus its manifest.json, which lists the SHA-256 of
/// every artifact written through it, the input hashes and the seeds.
class Workspace {
 public:
  explicit Workspace(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path path(const std::string& rel) const { return root_ / rel; }
  bool exists(const std::string& rel) const;
  std::string read(const std::string& rel) const;

  /// Writes the file, records its hash and rewrites the manifest.
  void write(const std::string& rel, const std::string& bytes);
  /// Records the hash of a file already under the root (e.g. a nested manifest).
  void track(const std::string& rel);
  void record_input(const std::string& name, const std::string& sha256);
  void record_seeds(const Json& seeds);

  const Json& manifest() const { return manifest_; }

 private:
  void save_manifest() const;

  std::filesystem::path root_;
  Json manifest_;
};

inline constexpr const char* kManifestName = "manifest.json";

/// Recomputes every artifact hash; returns the relative paths that differ or are missing.
std::vector<std::string> verify_manifest(const std::filesystem::path& root);

}  // namespace lmv
