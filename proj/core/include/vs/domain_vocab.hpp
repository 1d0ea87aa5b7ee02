#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vs/tokenizer.hpp"

namespace vs {

struct DomainVocabEntry {
  std::string token;
  std::uint64_t frequency = 0;
  std::int64_t merge_rank = -1;  // rank in the domain tokenizer; -1 for atomic tokens
};

struct DomainVocabulary {
  std::vector<DomainVocabEntry> entries;  // frequency desc, ties by merge rank asc
  std::size_t budget = 0;
};

// True iff every byte is in [A-Za-z].
bool is_alphabetic_token(std::string_view token);

// Domain vocabulary selection: domain-tokenizer tokens absent from the base
// vocabulary, alphabetic-only when refine is set, ranked by frequency over
// the domain corpus and truncated to budget. The non-overlap filter is not
// skippable. Returns fewer than budget entries without error when the
// corpus does not support more.
DomainVocabulary build_domain_vocab(const TokenizerModel& domain_model,
                                    const TokenizerModel& base_model,
                                    std::span<const std::string> corpus, std::size_t budget,
                                    bool refine = true);

// JSON lines, one entry per line in final order:
//   {"token":"<surface>","freq":N,"rank":K}
std::string save_domain_vocab(const DomainVocabulary& vocab);
void save_domain_vocab_file(const DomainVocabulary& vocab, const std::string& path);
DomainVocabulary load_domain_vocab_file(const std::string& path);

}  // namespace vs
