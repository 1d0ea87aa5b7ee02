#pragma once

#include <string>
#include <string_view>

#include "vs/tokenizer.hpp"

namespace vs {

// Token surface encoding used inside the interchange JSON. It survives a
// JSON round-trip unchanged, so the merges array can keep a single raw
// space as the left/right separator:
//   - single-byte tokens                      -> "<0xHH>"
//   - space, control bytes, '\', '<'          -> "\uXXXX"
//   - well-formed multi-byte UTF-8 sequences  -> literal
//   - bytes outside any valid UTF-8 sequence  -> "<0xHH>"
// surface_to_token is the exact inverse and rejects malformed escapes.
std::string token_surface(std::string_view token_bytes);
std::string surface_to_token(std::string_view surface);

// Canonical serialization: fixed key order, vocab keys sorted by surface
// string, merges in rank order, no insignificant whitespace. Byte-identical
// across runs for identical models.
std::string save_tokenizer(const TokenizerModel& model);
void save_tokenizer_file(const TokenizerModel& model, const std::string& path);

TokenizerModel load_tokenizer(std::string_view bytes);
TokenizerModel load_tokenizer_file(const std::string& path);

// Hash of the canonical serialization; stable under reformatting of the
// input file. Embedded in downstream artifacts to detect mismatched inputs.
std::string model_content_hash(const TokenizerModel& model);

}  // namespace vs
