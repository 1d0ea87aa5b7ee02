#pragma once

// Shared fixtures and oracles for the unit and acceptance suites. The
// reference encoder here is the independent check the fast encoder is
// validated against: it rescans the whole merge list each step instead of
// using the pair-rank index.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <random>
#include <unistd.h>
#include <string>
#include <string_view>
#include <vector>

#include "vs/embedding.hpp"
#include "vs/pretokenize.hpp"
#include "vs/tokenizer.hpp"

namespace vstest {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::size_t below(std::size_t bound) { return gen_() % bound; }
  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }
  double normal(double mean, double stddev) {
    return std::normal_distribution<double>(mean, stddev)(gen_);
  }
  std::mt19937_64& gen() { return gen_; }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

 private:
  std::mt19937_64 gen_;
};

// ---------------------------------------------------------------------------
// Reference encoder (oracle): per pre-token, scan all merges in rank order
// each step, apply the first applicable rule to every occurrence, repeat.
// ---------------------------------------------------------------------------

inline std::vector<vs::TokenId> reference_encode_piece(const vs::TokenizerModel& model,
                                                       std::string_view piece) {
  std::vector<std::string> syms;
  syms.reserve(piece.size());
  for (char c : piece) syms.emplace_back(1, c);
  for (;;) {
    bool applied = false;
    for (const vs::MergeRule& rule : model.merges()) {
      const std::string& left = model.token_bytes(rule.left);
      const std::string& right = model.token_bytes(rule.right);
      bool occurs = false;
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        if (syms[i] == left && syms[i + 1] == right) {
          occurs = true;
          break;
        }
      }
      if (!occurs) continue;
      std::vector<std::string> next;
      next.reserve(syms.size());
      for (std::size_t i = 0; i < syms.size();) {
        if (i + 1 < syms.size() && syms[i] == left && syms[i + 1] == right) {
          next.push_back(left + right);
          i += 2;
        } else {
          next.push_back(std::move(syms[i]));
          ++i;
        }
      }
      syms = std::move(next);
      applied = true;
      break;
    }
    if (!applied) break;
  }
  std::vector<vs::TokenId> ids;
  ids.reserve(syms.size());
  for (const std::string& s : syms) ids.push_back(*model.find(s));
  return ids;
}

inline std::vector<vs::TokenId> reference_encode(const vs::TokenizerModel& model,
                                                 std::string_view text) {
  std::string lowered;
  if (model.config().lowercase) {
    lowered = vs::lowercase_ascii(text);
    text = lowered;
  }
  std::vector<vs::TokenId> out;
  for (std::string_view piece : vs::pre_tokenize(text)) {
    auto ids = reference_encode_piece(model, piece);
    out.insert(out.end(), ids.begin(), ids.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random corpora and models
// ---------------------------------------------------------------------------

inline std::string random_word(Rng& rng, std::string_view alphabet, std::size_t min_len,
                               std::size_t max_len) {
  std::size_t len = min_len + rng.below(max_len - min_len + 1);
  std::string word;
  for (std::size_t i = 0; i < len; ++i) word.push_back(alphabet[rng.below(alphabet.size())]);
  return word;
}

inline std::vector<std::string> random_corpus(Rng& rng, std::size_t docs,
                                              std::string_view alphabet) {
  std::vector<std::string> corpus;
  for (std::size_t d = 0; d < docs; ++d) {
    std::string doc;
    std::size_t words = 3 + rng.below(8);
    for (std::size_t w = 0; w < words; ++w) {
      if (w) doc += ' ';
      doc += random_word(rng, alphabet, 1, 7);
    }
    corpus.push_back(std::move(doc));
  }
  return corpus;
}

// Appends atomic tokens (no producing merges) to a model; every one of
// them is unreachable by construction.
inline vs::TokenizerModel inject_atomic_tokens(const vs::TokenizerModel& model,
                                               const std::vector<std::string>& tokens) {
  std::vector<std::string> vocab;
  vocab.reserve(model.vocab_size() + tokens.size());
  for (std::size_t i = 0; i < model.vocab_size(); ++i) {
    vocab.push_back(model.token_bytes(static_cast<vs::TokenId>(i)));
  }
  for (const std::string& t : tokens) vocab.push_back(t);
  std::vector<std::pair<std::string, std::string>> merges;
  for (const vs::MergeRule& m : model.merges()) {
    merges.emplace_back(model.token_bytes(m.left), model.token_bytes(m.right));
  }
  return vs::TokenizerModel::build(std::move(vocab), merges, model.config());
}

inline vs::TokenizerModel random_toy_model(Rng& rng, std::size_t max_vocab = 1000) {
  static const std::vector<std::string> alphabets = {"ab", "abc", "abcd", "abcde", "abcdef"};
  const std::string& alphabet = alphabets[rng.below(alphabets.size())];
  auto corpus = random_corpus(rng, 60 + rng.below(200), alphabet);
  std::size_t vocab_size = 260 + rng.below(max_vocab - 260);
  return vs::train_bpe(corpus, vocab_size);
}

// Random strings exercising merges (model alphabet), raw bytes, and UTF-8.
inline std::string random_test_string(Rng& rng, std::string_view alphabet,
                                      std::size_t max_len = 256) {
  std::size_t len = 1 + rng.below(max_len);
  std::string s;
  s.reserve(len);
  static const std::vector<std::string> utf8_bits = {"é", "ß", "中", "🙂", "\xE2\x82"};
  while (s.size() < len) {
    switch (rng.below(8)) {
      case 0:
        s.push_back(static_cast<char>(rng.below(256)));
        break;
      case 1:
        s += utf8_bits[rng.below(utf8_bits.size())];
        break;
      case 2:
        s.push_back(' ');
        break;
      case 3:
        s.push_back(".,!?-"[rng.below(5)]);
        break;
      default:
        s.push_back(alphabet[rng.below(alphabet.size())]);
        break;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Embedding fixtures
// ---------------------------------------------------------------------------

inline vs::EmbeddingMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols,
                                         vs::MatrixRole role,
                                         const std::vector<vs::TokenId>& planted_low = {}) {
  vs::EmbeddingMatrix m(rows, cols, role);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      m.row(i)[j] = static_cast<float>(rng.normal(0.0, 0.3));
    }
  }
  for (vs::TokenId id : planted_low) {
    for (std::size_t j = 0; j < cols; ++j) {
      m.row(id)[j] = static_cast<float>(rng.normal(0.0, 1e-5));
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Deterministic fixture corpora: a general-English-like corpus and a
// domain corpus with a controlled fraction of long rare terms.
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& common_words() {
  static const std::vector<std::string> words = {
      "the",    "patient", "was",    "given",  "care",   "for",    "pain",  "and",
      "fever",  "with",    "daily",  "dose",   "of",     "rest",   "at",    "home",
      "plan",   "made",    "by",     "review", "in",     "clinic", "after", "week",
      "stable", "state",   "noted",  "on",     "exam",   "history", "shows", "mild",
      "signs",  "better",  "over",   "time",   "no",     "new",    "issue", "seen",
      "blood",  "test",    "normal", "range",  "values", "report", "sent",  "team",
      "visit",  "next",    "month",  "early",  "return", "if",     "worse", "advice"};
  return words;
}

inline std::vector<std::string> domain_terms() {
  static const std::vector<std::string> prefixes = {"osteo",  "cardio", "neuro",  "hepato",
                                                    "broncho", "thrombo", "gastro", "nephro",
                                                    "dermato", "pneumo"};
  static const std::vector<std::string> suffixes = {"porosis", "myopathy", "pathy",  "itis",
                                                    "osis",     "ectasis",  "megaly", "penia",
                                                    "plasty",   "sclerosis"};
  std::vector<std::string> terms;
  for (const std::string& p : prefixes) {
    for (const std::string& s : suffixes) terms.push_back(p + s);
  }
  return terms;
}

inline std::vector<std::string> general_fixture_corpus(std::size_t docs = 1500,
                                                       std::uint64_t seed = 101) {
  Rng rng(seed);
  std::vector<std::string> corpus;
  for (std::size_t d = 0; d < docs; ++d) {
    std::string doc;
    std::size_t words = 8 + rng.below(10);
    for (std::size_t w = 0; w < words; ++w) {
      if (w) doc += ' ';
      doc += rng.pick(common_words());
    }
    corpus.push_back(std::move(doc));
  }
  return corpus;
}

// oov_frac of the words are domain terms, the rest common words.
inline std::vector<std::string> domain_fixture_corpus(double oov_frac, std::size_t docs = 1500,
                                                      std::uint64_t seed = 202) {
  Rng rng(seed);
  auto terms = domain_terms();
  std::vector<std::string> corpus;
  for (std::size_t d = 0; d < docs; ++d) {
    std::string doc;
    std::size_t words = 8 + rng.below(10);
    for (std::size_t w = 0; w < words; ++w) {
      if (w) doc += ' ';
      doc += (rng.unit() < oov_frac) ? rng.pick(terms) : rng.pick(common_words());
    }
    corpus.push_back(std::move(doc));
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Scratch directories
// ---------------------------------------------------------------------------

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("vs_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter()++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  static std::uint64_t& counter() {
    static std::uint64_t c = 0;
    return c;
  }
  std::filesystem::path path_;
};

}  // namespace vstest
