#include "lmv/core/nvtj.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lmv/core/errors.hpp"

namespace lmv {

namespace {

constexpr char kMagic[4] = {'N', 'V', 'T', 'J'};

template <typename T>
void put_le(std::string& out, T value) {
  static_assert(std::is_unsigned_v<T>);
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
}

template <typename T>
T get_le(const std::string& in, std::size_t offset) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    value |= static_cast<T>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  return value;
}

void need(const std::string& bytes, std::size_t offset, std::size_t count, const char* what) {
  if (bytes.size() < offset + count) {
    throw FormatError("NVTJ truncated while reading " + std::string(what) + ": expected at least " +
                          std::to_string(offset + count) + " bytes, got " + std::to_string(bytes.size()),
                      bytes.size());
  }
}

}  // namespace

std::string encode_nvtj(const NvtjFile& file) {
  Json header = file.header;
  std::vector<std::size_t> sizes;
  for (const auto& b : file.blocks) sizes.push_back(b.size());
  header["blocks"] = sizes;
  const std::string text = header.dump();
  std::string out(kMagic, 4);
  put_le<std::uint32_t>(out, kNvtjVersion);
  put_le<std::uint64_t>(out, text.size());
  out += text;
  for (const auto& b : file.blocks)
    for (double v : b) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

NvtjFile decode_nvtj(const std::string& bytes) {
  need(bytes, 0, 4, "magic");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("not an NVTJ file: bad magic", 0);
  need(bytes, 4, 4, "version");
  const auto version = get_le<std::uint32_t>(bytes, 4);
  if (version != kNvtjVersion) throw FormatError("unsupported NVTJ version " + std::to_string(version), 4);
  need(bytes, 8, 8, "header length");
  const auto header_len = get_le<std::uint64_t>(bytes, 8);
  need(bytes, 16, header_len, "header");
  NvtjFile file;
  try {
    file.header = Json::parse(bytes.substr(16, header_len));
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed NVTJ header: ") + e.what(), 16);
  }
  if (!file.header.is_object() || !file.header.contains("blocks") || !file.header["blocks"].is_array())
    throw FormatError("NVTJ header lacks a block table", 16);
  std::size_t offset = 16 + header_len;
  std::size_t total = 0;
  for (const auto& n : file.header["blocks"]) total += n.get<std::size_t>();
  const std::size_t expected = offset + 8 * total;
  if (bytes.size() != expected) {
    throw FormatError("NVTJ payload length mismatch: expected " + std::to_string(expected) + " bytes, got " +
                          std::to_string(bytes.size()),
                      std::min(bytes.size(), expected));
  }
  for (const auto& n : file.header["blocks"]) {
    std::vector<double> block(n.get<std::size_t>());
    for (double& v : block) {
      v = std::bit_cast<double>(get_le<std::uint64_t>(bytes, offset));
      offset += 8;
    }
    file.blocks.push_back(std::move(block));
  }
  file.header.erase("blocks");
  return file;
}

void write_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write to '" + path + "' failed");
}

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_nvtj(const std::string& path, const NvtjFile& file) { write_bytes(path, encode_nvtj(file)); }

NvtjFile read_nvtj(const std::string& path) { return decode_nvtj(read_bytes(path)); }

void expect_nvtj_kind(const NvtjFile& file, const std::string& kind) {
  const std::string got = file.header.value("kind", std::string());
  if (got != kind) throw FormatError("NVTJ payload is '" + got + "', expected '" + kind + "'", 16);
}

}  // namespace lmv
