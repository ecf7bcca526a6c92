#pragma once

// Shared file format for model and training checkpoints: one line of compact
// JSON (header) terminated by '\n', followed by the declared number of
// IEEE 754 doubles in little-endian byte order.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "surfseg/error.hpp"

namespace surfseg::detail {

inline void write_payload_file(const std::filesystem::path& path,
                               const nlohmann::json& header,
                               const std::vector<double>& payload) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open for writing: " + path.string());
  f << header.dump() << '\n';
  for (double v : payload) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    unsigned char bytes[8];
    for (int k = 0; k < 8; ++k) bytes[k] = static_cast<unsigned char>((bits >> (8 * k)) & 0xFF);
    f.write(reinterpret_cast<const char*>(bytes), 8);
  }
  if (!f) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

inline nlohmann::json read_payload_file(const std::filesystem::path& path,
                                        std::vector<double>& payload) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open for reading: " + path.string());
  std::string line;
  if (!std::getline(f, line)) {
    throw Error(ErrorCode::IoError, path.string() + ": missing header line");
  }
  nlohmann::json header = nlohmann::json::parse(line, nullptr, false);
  if (header.is_discarded()) {
    throw Error(ErrorCode::IoError, path.string() + ": malformed JSON header");
  }
  const std::uint64_t n = header.value("payload_len", std::uint64_t{0});
  payload.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    unsigned char bytes[8];
    if (!f.read(reinterpret_cast<char*>(bytes), 8)) {
      throw Error(ErrorCode::IoError, path.string() + ": truncated payload");
    }
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(bytes[k]) << (8 * k);
    payload[i] = std::bit_cast<double>(bits);
  }
  return header;
}

}  // namespace surfseg::detail
