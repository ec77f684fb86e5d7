#pragma once

#include <string>
#include <vector>

#include "lmv/core/json_io.hpp"

namespace lmv {

/// The NVTJ container: "NVTJ", u32 version, u64 header length, JSON header,
/// then little-endian f64 blocks whose lengths are listed in header["blocks"].
/// header["kind"] tags the payload (trajectory, visualizer, pca, kpca).
struct NvtjFile {
  Json header;
  std::vector<std::vector<double>> blocks;
};

inline constexpr std::uint32_t kNvtjVersion = 1;

/// Serializes to bytes; header["blocks"] is filled in from `file.blocks`.
std::string encode_nvtj(const NvtjFile& file);
NvtjFile decode_nvtj(const std::string& bytes);

void write_nvtj(const std::string& path, const NvtjFile& file);
NvtjFile read_nvtj(const std::string& path);

/// Reads `header["kind"]` and throws FormatError unless it equals `kind`.
void expect_nvtj_kind(const NvtjFile& file, const std::string& kind);

/// Writes bytes to a file, throwing Error on failure.
void write_bytes(const std::string& path, const std::string& bytes);
std::string read_bytes(const std::string& path);

}  // namespace lmv
