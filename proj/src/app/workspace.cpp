#include "lmv/app/workspace.hpp"

#include <fstream>
#include <vector>

#include "lmv/core/errors.hpp"
#include "lmv/core/hash.hpp"
#include "lmv/core/nvtj.hpp"

namespace lmv {

Workspace::Workspace(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_);
  const auto mp = root_ / kManifestName;
  if (std::filesystem::exists(mp)) {
    try {
      manifest_ = Json::parse(read_bytes(mp.string()));
    } catch (const Json::parse_error& e) {
      throw FormatError(mp.string() + ": " + e.what(), e.byte);
    }
  } else {
    manifest_ = Json{{"format", "lmviz-manifest"}, {"version", 1}, {"inputs", Json::object()},
                     {"seeds", Json::object()}, {"artifacts", Json::object()}};
  }
}

bool Workspace::exists(const std::string& rel) const { return std::filesystem::exists(path(rel)); }

std::string Workspace::read(const std::string& rel) const {
  if (!exists(rel)) throw NotFoundError("missing artifact '" + path(rel).string() + "'");
  return read_bytes(path(rel).string());
}

void Workspace::write(const std::string& rel, const std::string& bytes) {
  const auto p = path(rel);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  write_bytes(p.string(), bytes);
  manifest_["artifacts"][rel] = sha256_hex(bytes);
  save_manifest();
}

void Workspace::track(const std::string& rel) {
  manifest_["artifacts"][rel] = sha256_hex(read(rel));
  save_manifest();
}

void Workspace::record_input(const std::string& name, const std::string& sha256) {
  manifest_["inputs"][name] = sha256;
  save_manifest();
}

void Workspace::record_seeds(const Json& seeds) {
  for (const auto& [k, v] : seeds.items()) manifest_["seeds"][k] = v;
  save_manifest();
}

void Workspace::save_manifest() const { write_bytes((root_ / kManifestName).string(), manifest_.dump(2) + "\n"); }

std::vector<std::string> verify_manifest(const std::filesystem::path& root) {
  const Json m = Json::parse(read_bytes((root / kManifestName).string()));
  std::vector<std::string> bad;
  for (const auto& [rel, sha] : m.at("artifacts").items()) {
    const auto p = root / rel;
    if (!std::filesystem::exists(p) || sha256_file(p.string()) != sha.get<std::string>()) bad.push_back(rel);
  }
  return bad;
}

}  // namespace lmv
