#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace vs {

// Dense index into a tokenizer vocabulary. Ids 0..255 are the reserved
// single-byte fallback tokens.
using TokenId = std::uint32_t;

inline constexpr std::size_t kByteTokenCount = 256;

// A model, plan, or derived artifact violates a structural invariant.
// Maps to process exit code 1 in the CLI.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unusable input: missing file, malformed document, out-of-range argument.
// Maps to process exit code 2 in the CLI.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vs
