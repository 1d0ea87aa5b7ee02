#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vs {

struct PreTokenizerConfig {
  enum class Mode { whitespace_punct };

  Mode mode = Mode::whitespace_punct;
  bool lowercase = false;

  bool operator==(const PreTokenizerConfig&) const = default;
};

bool is_ascii_space(unsigned char c);
bool is_ascii_punct(unsigned char c);

// Partitions text into pre-tokens covering every input byte exactly once:
// whitespace runs, words, and leading/trailing punctuation runs split off
// each word. Merges never cross the returned boundaries. Case transforms
// are the caller's job (see lowercase_ascii); this function is a pure
// splitter so that decode can reassemble the original bytes.
std::vector<std::string_view> pre_tokenize(std::string_view text);

std::string lowercase_ascii(std::string_view text);

}  // namespace vs
