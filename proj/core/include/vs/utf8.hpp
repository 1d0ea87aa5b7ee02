#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace vs {

// Length of the well-formed UTF-8 sequence starting at data[pos], or 0 if
// the bytes there do not form one (overlongs, surrogates, and code points
// past U+10FFFF all count as malformed).
std::size_t utf8_sequence_length(std::string_view data, std::size_t pos);

bool is_valid_utf8(std::string_view data);

// Minimal UTF-8 encoding of a code point (cp <= 0x10FFFF, not a surrogate).
std::string utf8_encode(std::uint32_t cp);

}  // namespace vs
