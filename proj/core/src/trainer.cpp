#include <algorithm>
#include <cstdint>
#include <queue>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "vs/tokenizer.hpp"

namespace vs {

namespace {

std::uint64_t pair_key(TokenId left, TokenId right) {
  return (static_cast<std::uint64_t>(left) << 32) | right;
}

struct Word {
  std::vector<TokenId> symbols;
  std::uint64_t count = 0;
};

struct HeapEntry {
  std::uint64_t count = 0;
  std::string left;
  std::string right;
  std::uint64_t key = 0;
};

// Max-heap on count; ties prefer the lexicographically smallest
// (left, right) byte-string pair, keeping training platform-independent.
struct HeapLess {
  bool operator()(const HeapEntry& a, const HeapEntry& b) const {
    if (a.count != b.count) return a.count < b.count;
    if (a.left != b.left) return a.left > b.left;
    return a.right > b.right;
  }
};

}  // namespace

TokenizerModel train_bpe(std::span<const std::string> corpus, std::size_t vocab_size,
                         PreTokenizerConfig cfg) {
  if (vocab_size <= kByteTokenCount) {
    throw InputError("vocab_size must exceed 256, got " + std::to_string(vocab_size));
  }

  // Pre-token histogram over the whole corpus; merges never cross
  // pre-token boundaries, so this is all the trainer needs.
  std::unordered_map<std::string, std::uint64_t> piece_counts;
  for (const std::string& raw : corpus) {
    std::string_view doc = raw;
    std::string lowered;
    if (cfg.lowercase) {
      lowered = lowercase_ascii(doc);
      doc = lowered;
    }
    for (std::string_view piece : pre_tokenize(doc)) {
      piece_counts[std::string(piece)] += 1;
    }
  }
  if (piece_counts.empty()) {
    throw InputError("empty corpus");
  }

  std::vector<std::string> vocab(kByteTokenCount);
  for (std::size_t b = 0; b < kByteTokenCount; ++b) vocab[b] = std::string(1, static_cast<char>(b));
  std::unordered_map<std::string, TokenId> vocab_index;
  for (std::size_t b = 0; b < kByteTokenCount; ++b)
    vocab_index.emplace(vocab[b], static_cast<TokenId>(b));

  std::vector<Word> words;
  words.reserve(piece_counts.size());
  {
    std::vector<std::pair<std::string, std::uint64_t>> sorted(piece_counts.begin(),
                                                              piece_counts.end());
    std::sort(sorted.begin(), sorted.end());
    for (auto& [piece, count] : sorted) {
      Word w;
      w.count = count;
      w.symbols.reserve(piece.size());
      for (unsigned char c : piece) w.symbols.push_back(static_cast<TokenId>(c));
      words.push_back(std::move(w));
    }
  }

  std::unordered_map<std::uint64_t, std::uint64_t> pair_counts;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> pair_words;
  std::unordered_set<std::uint64_t> touched;

  auto add_word_pairs = [&](std::size_t idx, std::int64_t sign) {
    const Word& w = words[idx];
    for (std::size_t i = 0; i + 1 < w.symbols.size(); ++i) {
      std::uint64_t key = pair_key(w.symbols[i], w.symbols[i + 1]);
      touched.insert(key);
      if (sign > 0) {
        pair_counts[key] += w.count;
        auto& list = pair_words[key];
        if (list.empty() || list.back() != idx) list.push_back(idx);
      } else {
        auto it = pair_counts.find(key);
        it->second -= w.count;
        if (it->second == 0) pair_counts.erase(it);
      }
    }
  };

  for (std::size_t idx = 0; idx < words.size(); ++idx) add_word_pairs(idx, +1);
  touched.clear();

  std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapLess> heap;
  for (const auto& [key, count] : pair_counts) {
    heap.push({count, vocab[static_cast<TokenId>(key >> 32)],
               vocab[static_cast<TokenId>(key & 0xFFFFFFFFu)], key});
  }

  // Pairs whose concatenation collided with an existing token string; they
  // stay counted but can never become rules.
  std::unordered_set<std::uint64_t> banned;

  std::vector<std::pair<std::string, std::string>> merges;
  while (vocab.size() < vocab_size && !heap.empty()) {
    HeapEntry best = heap.top();
    heap.pop();
    auto cit = pair_counts.find(best.key);
    if (cit == pair_counts.end() || cit->second != best.count) continue;  // stale
    if (banned.count(best.key)) continue;
    if (best.count < 2) break;

    std::string product = best.left + best.right;
    if (vocab_index.count(product)) {
      banned.insert(best.key);
      continue;
    }

    TokenId left_id = static_cast<TokenId>(best.key >> 32);
    TokenId right_id = static_cast<TokenId>(best.key & 0xFFFFFFFFu);
    TokenId product_id = static_cast<TokenId>(vocab.size());
    vocab.push_back(product);
    vocab_index.emplace(product, product_id);
    merges.emplace_back(best.left, best.right);

    std::vector<std::size_t> affected;
    if (auto wit = pair_words.find(best.key); wit != pair_words.end()) {
      affected = std::move(wit->second);
      pair_words.erase(wit);
    }
    std::sort(affected.begin(), affected.end());
    affected.erase(std::unique(affected.begin(), affected.end()), affected.end());

    touched.clear();
    for (std::size_t idx : affected) {
      Word& w = words[idx];
      bool present = false;
      for (std::size_t i = 0; i + 1 < w.symbols.size(); ++i) {
        if (w.symbols[i] == left_id && w.symbols[i + 1] == right_id) {
          present = true;
          break;
        }
      }
      if (!present) continue;  // stale membership
      add_word_pairs(idx, -1);
      std::size_t write = 0;
      for (std::size_t r = 0; r < w.symbols.size();) {
        if (r + 1 < w.symbols.size() && w.symbols[r] == left_id && w.symbols[r + 1] == right_id) {
          w.symbols[write++] = product_id;
          r += 2;
        } else {
          w.symbols[write++] = w.symbols[r++];
        }
      }
      w.symbols.resize(write);
      add_word_pairs(idx, +1);
    }

    // Re-queue every pair whose count moved, including pairs that only
    // shrank; their old heap entries are now stale and must be replaced.
    for (std::uint64_t key : touched) {
      auto pit = pair_counts.find(key);
      if (pit == pair_counts.end()) continue;
      heap.push({pit->second, vocab[static_cast<TokenId>(key >> 32)],
                 vocab[static_cast<TokenId>(key & 0xFFFFFFFFu)], key});
    }
  }

  return TokenizerModel::build(std::move(vocab), merges, cfg);
}

}  // namespace vs
