#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vs/pretokenize.hpp"
#include "vs/types.hpp"

namespace vs {

// One BPE merge; rank is the rule's index in TokenizerModel::merges().
// result always equals token_bytes(left) + token_bytes(right).
struct MergeRule {
  TokenId left = 0;
  TokenId right = 0;
  TokenId result = 0;
};

// Byte-level BPE tokenizer model. Immutable after construction and safe to
// share across threads. Vocabulary layout:
//   ids 0..255          the single-byte fallback tokens (id == byte value)
//   ids 256..           merge products and declared atomic tokens
// Every multi-byte token is produced by exactly one merge rule or is atomic
// (present in the vocabulary with no producing rule).
class TokenizerModel {
 public:
  // Validates and assembles a model. `vocab[i]` is the byte string of token
  // id i; merges are (left, right) byte-string pairs in rank order whose
  // concatenation must name an existing token. Throws ValidationError with
  // a message naming the first violated invariant.
  static TokenizerModel build(std::vector<std::string> vocab,
                              const std::vector<std::pair<std::string, std::string>>& merges,
                              PreTokenizerConfig cfg = {});

  std::size_t vocab_size() const { return vocab_.size(); }
  const std::string& token_bytes(TokenId id) const;
  std::optional<TokenId> find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token).has_value(); }
  std::span<const MergeRule> merges() const { return merges_; }
  const PreTokenizerConfig& config() const { return config_; }

  // Rank of the merge producing `id`, or nullopt for byte/atomic tokens.
  std::optional<std::size_t> producing_rank(TokenId id) const;

  // Greedy lowest-rank-first BPE within each pre-token. Total: byte
  // fallback guarantees every input encodes. With lowercase enabled the
  // text is folded first (and round-trips only up to case).
  std::vector<TokenId> encode(std::string_view text) const;

  // Exact byte concatenation of the tokens; inverse of encode for
  // lowercase-off models.
  std::string decode_bytes(std::span<const TokenId> ids) const;

  // Lenient text rendering: bytes that do not form valid UTF-8 come out as
  // U+FFFD replacement characters.
  std::string decode_text(std::span<const TokenId> ids) const;

 private:
  TokenizerModel() = default;

  std::vector<TokenId> encode_pretoken(std::string_view piece) const;

  std::vector<std::string> vocab_;
  std::unordered_map<std::string_view, TokenId> index_;
  std::vector<MergeRule> merges_;
  // (left << 32 | right) -> rank
  std::unordered_map<std::uint64_t, std::uint32_t> pair_rank_;
  std::vector<std::int64_t> producer_rank_;  // -1 for byte/atomic tokens
  PreTokenizerConfig config_;
};

// Standard BPE training over pre-tokenized documents: start from the 256
// byte tokens, repeatedly merge the most frequent adjacent pair (count >= 2,
// ties broken lexicographically on the (left, right) byte strings) until
// vocab_size is reached. Deterministic for a fixed corpus and config.
TokenizerModel train_bpe(std::span<const std::string> corpus, std::size_t vocab_size,
                         PreTokenizerConfig cfg = {});

// Occurrence count per token id over encode() of every document. Ids never
// emitted map to 0. Document chunks run in parallel; counts are merged in
// chunk order so the result is independent of the worker count.
std::vector<std::uint64_t> token_frequencies(const TokenizerModel& model,
                                             std::span<const std::string> corpus);

}  // namespace vs
