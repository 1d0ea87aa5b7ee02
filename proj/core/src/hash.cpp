#include "vs/hash.hpp"

#include <cstdio>

#include "vs/corpus.hpp"

namespace vs {

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::string bytes_content_hash(std::string_view bytes) {
  return "fnv1a64:" + hash_hex(fnv1a64(bytes));
}

std::string file_content_hash(const std::string& path) {
  return bytes_content_hash(read_file_bytes(path));
}

}  // namespace vs
