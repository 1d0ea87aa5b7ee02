#pragma once

#include <map>
#include <string>
#include <vector>

#include "vs/embedding.hpp"
#include "vs/surgery.hpp"
#include "vs/tokenizer.hpp"

namespace vs {

struct InitEntry {
  std::string token;
  TokenId new_id = 0;
  bool replaced = false;  // false: appended
  std::vector<TokenId> constituents;
  double embedding_norm = 0.0;
  double unembedding_norm = 0.0;
};

struct InitReport {
  std::size_t replaced_rows = 0;
  std::size_t appended_rows = 0;
  std::vector<InitEntry> entries;  // one per new token, placement order
};

struct InitResult {
  EmbeddingMatrix embedding;
  EmbeddingMatrix unembedding;
  InitReport report;
};

// Subword-mean initialization. Every new token's constituents come from the
// pre-surgery tokenizer (intermediates included), so each new row is the
// arithmetic mean (64-bit accumulation) of base rows; the embedding and
// unembedding matrices each aggregate their own rows. Replaced slots are
// overwritten in place, appended rows extend the matrices to the final
// vocabulary size, and untouched rows are bit-identical to the input.
InitResult init_new_rows(const TokenizerModel& base_model, const SurgeryPlan& plan,
                         const EmbeddingMatrix& embedding, const EmbeddingMatrix& unembedding);

void save_init_report(const InitReport& report,
                      const std::map<std::string, std::string>& input_hashes,
                      const std::string& path);

}  // namespace vs
