#include "vs/pretokenize.hpp"

namespace vs {

bool is_ascii_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

bool is_ascii_punct(unsigned char c) {
  return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
         (c >= 0x7B && c <= 0x7E);
}

std::vector<std::string_view> pre_tokenize(std::string_view text) {
  std::vector<std::string_view> pieces;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    if (is_ascii_space(text[i])) {
      std::size_t j = i + 1;
      while (j < n && is_ascii_space(text[j])) ++j;
      pieces.push_back(text.substr(i, j - i));
      i = j;
      continue;
    }
    std::size_t j = i + 1;
    while (j < n && !is_ascii_space(text[j])) ++j;
    // word chunk [i, j): peel leading and trailing punctuation runs
    std::size_t a = i;
    while (a < j && is_ascii_punct(text[a])) ++a;
    if (a == j) {
      pieces.push_back(text.substr(i, j - i));  // pure punctuation
    } else {
      std::size_t b = j;
      while (b > a && is_ascii_punct(text[b - 1])) --b;
      if (a > i) pieces.push_back(text.substr(i, a - i));
      pieces.push_back(text.substr(a, b - a));
      if (b < j) pieces.push_back(text.substr(b, j - b));
    }
    i = j;
  }
  return pieces;
}

std::string lowercase_ascii(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace vs
