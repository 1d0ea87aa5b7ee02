#include "vs/tokenizer.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

#include "vs/parallel.hpp"
#include "vs/utf8.hpp"

namespace vs {

namespace {

std::uint64_t pair_key(TokenId left, TokenId right) {
  return (static_cast<std::uint64_t>(left) << 32) | right;
}

}  // namespace

TokenizerModel TokenizerModel::build(std::vector<std::string> vocab,
                                     const std::vector<std::pair<std::string, std::string>>& merges,
                                     PreTokenizerConfig cfg) {
  TokenizerModel m;
  if (vocab.size() < kByteTokenCount) {
    throw ValidationError("vocabulary smaller than the 256 byte-fallback tokens");
  }
  if (vocab.size() > std::numeric_limits<TokenId>::max()) {
    throw ValidationError("vocabulary too large for 32-bit token ids");
  }
  m.vocab_ = std::move(vocab);
  m.index_.reserve(m.vocab_.size() * 2);
  for (std::size_t id = 0; id < m.vocab_.size(); ++id) {
    const std::string& tok = m.vocab_[id];
    if (tok.empty()) {
      throw ValidationError("empty token string at id " + std::to_string(id));
    }
    auto [it, inserted] = m.index_.emplace(std::string_view(tok), static_cast<TokenId>(id));
    if (!inserted) {
      throw ValidationError("duplicate token string at ids " + std::to_string(it->second) +
                            " and " + std::to_string(id));
    }
  }
  for (std::size_t b = 0; b < kByteTokenCount; ++b) {
    if (m.vocab_[b].size() != 1 ||
        static_cast<unsigned char>(m.vocab_[b][0]) != static_cast<unsigned char>(b)) {
      throw ValidationError("id " + std::to_string(b) +
                            " must hold the single-byte fallback token 0x" +
                            std::to_string(b));
    }
  }

  m.producer_rank_.assign(m.vocab_.size(), -1);
  m.merges_.reserve(merges.size());
  m.pair_rank_.reserve(merges.size() * 2);
  for (std::size_t rank = 0; rank < merges.size(); ++rank) {
    const auto& [left, right] = merges[rank];
    auto lit = m.index_.find(std::string_view(left));
    auto rit = m.index_.find(std::string_view(right));
    if (lit == m.index_.end() || rit == m.index_.end()) {
      throw ValidationError("merge " + std::to_string(rank) + " references unknown token");
    }
    std::string result = left + right;
    auto pit = m.index_.find(std::string_view(result));
    if (pit == m.index_.end()) {
      throw ValidationError("dangling merge result at rank " + std::to_string(rank));
    }
    TokenId result_id = pit->second;
    if (m.producer_rank_[result_id] >= 0) {
      throw ValidationError("token id " + std::to_string(result_id) +
                            " produced by more than one merge rule");
    }
    auto [mit, fresh] = m.pair_rank_.emplace(pair_key(lit->second, rit->second),
                                             static_cast<std::uint32_t>(rank));
    if (!fresh) {
      throw ValidationError("duplicate merge pair at rank " + std::to_string(rank));
    }
    m.producer_rank_[result_id] = static_cast<std::int64_t>(rank);
    m.merges_.push_back({lit->second, rit->second, result_id});
  }
  // Second pass now that every producer rank is known: a rule may only use
  // operands that are byte tokens, atomic, or produced at a lower rank.
  for (std::size_t rank = 0; rank < m.merges_.size(); ++rank) {
    for (TokenId op : {m.merges_[rank].left, m.merges_[rank].right}) {
      if (m.producer_rank_[op] >= 0 &&
          static_cast<std::size_t>(m.producer_rank_[op]) >= rank) {
        throw ValidationError("merge " + std::to_string(rank) +
                              " uses an operand produced at rank " +
                              std::to_string(m.producer_rank_[op]));
      }
    }
  }
  m.config_ = cfg;
  return m;
}

const std::string& TokenizerModel::token_bytes(TokenId id) const {
  if (id >= vocab_.size()) {
    throw InputError("token id " + std::to_string(id) + " out of range");
  }
  return vocab_[id];
}

std::optional<TokenId> TokenizerModel::find(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> TokenizerModel::producing_rank(TokenId id) const {
  if (id >= vocab_.size()) return std::nullopt;
  if (producer_rank_[id] < 0) return std::nullopt;
  return static_cast<std::size_t>(producer_rank_[id]);
}

std::vector<TokenId> TokenizerModel::encode_pretoken(std::string_view piece) const {
  std::vector<TokenId> syms;
  syms.reserve(piece.size());
  for (unsigned char c : piece) syms.push_back(static_cast<TokenId>(c));

  while (syms.size() > 1) {
    // lowest-rank applicable merge across all adjacent pairs
    std::uint32_t best_rank = std::numeric_limits<std::uint32_t>::max();
    TokenId best_left = 0, best_right = 0;
    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
      auto it = pair_rank_.find(pair_key(syms[i], syms[i + 1]));
      if (it != pair_rank_.end() && it->second < best_rank) {
        best_rank = it->second;
        best_left = syms[i];
        best_right = syms[i + 1];
      }
    }
    if (best_rank == std::numeric_limits<std::uint32_t>::max()) break;
    TokenId product = merges_[best_rank].result;
    // merge every occurrence left to right, skipping overlaps
    std::size_t w = 0;
    for (std::size_t r = 0; r < syms.size();) {
      if (r + 1 < syms.size() && syms[r] == best_left && syms[r + 1] == best_right) {
        syms[w++] = product;
        r += 2;
      } else {
        syms[w++] = syms[r++];
      }
    }
    syms.resize(w);
  }
  return syms;
}

std::vector<TokenId> TokenizerModel::encode(std::string_view text) const {
  std::string lowered;
  if (config_.lowercase) {
    lowered = lowercase_ascii(text);
    text = lowered;
  }
  std::vector<TokenId> out;
  out.reserve(text.size() / 3 + 1);
  for (std::string_view piece : pre_tokenize(text)) {
    auto ids = encode_pretoken(piece);
    out.insert(out.end(), ids.begin(), ids.end());
  }
  return out;
}

std::string TokenizerModel::decode_bytes(std::span<const TokenId> ids) const {
  std::string out;
  for (TokenId id : ids) out += token_bytes(id);
  return out;
}

std::string TokenizerModel::decode_text(std::span<const TokenId> ids) const {
  std::string bytes = decode_bytes(ids);
  std::string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  while (i < bytes.size()) {
    std::size_t len = utf8_sequence_length(bytes, i);
    if (len == 0) {
      out += "\xEF\xBF\xBD";  // U+FFFD
      ++i;
    } else {
      out.append(bytes, i, len);
      i += len;
    }
  }
  return out;
}

std::vector<std::uint64_t> token_frequencies(const TokenizerModel& model,
                                             std::span<const std::string> corpus) {
  std::size_t chunks = std::min(worker_count(), std::max<std::size_t>(corpus.size(), 1));
  std::vector<std::vector<std::uint64_t>> partial(
      chunks, std::vector<std::uint64_t>(model.vocab_size(), 0));
  parallel_chunks(corpus.size(), [&](std::size_t c, std::size_t begin, std::size_t end) {
    auto& counts = partial[c];
    std::unordered_map<std::string, std::vector<TokenId>> cache;
    for (std::size_t d = begin; d < end; ++d) {
      std::string_view doc = corpus[d];
      std::string lowered;
      if (model.config().lowercase) {
        lowered = lowercase_ascii(doc);
        doc = lowered;
      }
      for (std::string_view piece : pre_tokenize(doc)) {
        auto [it, fresh] = cache.try_emplace(std::string(piece));
        if (fresh) it->second = model.encode(it->first);
        for (TokenId id : it->second) ++counts[id];
      }
    }
  });
  std::vector<std::uint64_t> total(model.vocab_size(), 0);
  for (const auto& counts : partial) {
    for (std::size_t i = 0; i < counts.size(); ++i) total[i] += counts[i];
  }
  return total;
}

}  // namespace vs
