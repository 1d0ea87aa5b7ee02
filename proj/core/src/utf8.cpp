#include "vs/utf8.hpp"

namespace vs {

namespace {

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

}  // namespace

std::size_t utf8_sequence_length(std::string_view data, std::size_t pos) {
  if (pos >= data.size()) return 0;
  unsigned char b0 = static_cast<unsigned char>(data[pos]);
  if (b0 < 0x80) return 1;
  if (b0 < 0xC2) return 0;  // continuation byte or overlong lead
  std::size_t remaining = data.size() - pos;
  if (b0 < 0xE0) {
    if (remaining < 2 || !is_continuation(data[pos + 1])) return 0;
    return 2;
  }
  if (b0 < 0xF0) {
    if (remaining < 3 || !is_continuation(data[pos + 1]) || !is_continuation(data[pos + 2]))
      return 0;
    unsigned char b1 = static_cast<unsigned char>(data[pos + 1]);
    if (b0 == 0xE0 && b1 < 0xA0) return 0;  // overlong
    if (b0 == 0xED && b1 > 0x9F) return 0;  // surrogate
    return 3;
  }
  if (b0 < 0xF5) {
    if (remaining < 4 || !is_continuation(data[pos + 1]) || !is_continuation(data[pos + 2]) ||
        !is_continuation(data[pos + 3]))
      return 0;
    unsigned char b1 = static_cast<unsigned char>(data[pos + 1]);
    if (b0 == 0xF0 && b1 < 0x90) return 0;  // overlong
    if (b0 == 0xF4 && b1 > 0x8F) return 0;  // past U+10FFFF
    return 4;
  }
  return 0;
}

bool is_valid_utf8(std::string_view data) {
  std::size_t i = 0;
  while (i < data.size()) {
    std::size_t len = utf8_sequence_length(data, i);
    if (len == 0) return false;
    i += len;
  }
  return true;
}

std::string utf8_encode(std::uint32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

}  // namespace vs
