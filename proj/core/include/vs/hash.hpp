#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace vs {

// FNV-1a 64-bit. Used for artifact provenance stamps; collision resistance
// beyond accidental mismatch detection is not a goal.
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h);

// fnv1a64 over the raw bytes of a file, formatted as "fnv1a64:<16 hex>".
std::string file_content_hash(const std::string& path);
std::string bytes_content_hash(std::string_view bytes);

}  // namespace vs
