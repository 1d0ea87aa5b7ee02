#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vs/corpus.hpp"
#include "vs/tokenizer.hpp"

namespace vs {

// Unigrams: whitespace-delimited words with leading/trailing ASCII
// punctuation stripped; words that are pure punctuation vanish. Occurrence
// order, duplicates kept.
std::vector<std::string> extract_unigrams(std::string_view text);

// Mean encode length per unigram; 1.0 for text without unigrams. Word
// fragmentation only: whitespace tokens never enter the count.
double fragment_score(const TokenizerModel& model, std::string_view text);

// Fraction of unigram occurrences whose encode length is >= split_threshold.
double oov_concentration(const TokenizerModel& model, std::string_view text,
                         std::size_t split_threshold = 2);

// Fraction of distinct summary unigrams absent from the source, matched
// case-folded (set semantics). Empty summary -> 0.
double novel_unigram_concentration(std::string_view source, std::string_view summary);

struct DocumentStats {
  std::uint64_t sd_token_count = 0;
  std::uint64_t rs_token_count = 0;
  double sd_oov_conc = 0.0;
  double rs_oov_conc = 0.0;
  double fragment_sd = 1.0;
  double fragment_rs = 1.0;
  double novel_unigram_conc = 0.0;
};

DocumentStats document_stats(const TokenizerModel& model, const PairedRecord& record,
                             std::size_t split_threshold = 2);

struct AggregateStats {
  double sd_token_count = 0.0;
  double rs_token_count = 0.0;
  double sd_oov_conc = 0.0;
  double rs_oov_conc = 0.0;
  double fragment_sd = 0.0;
  double fragment_rs = 0.0;
  double novel_unigram_conc = 0.0;
};

struct CorpusReport {
  std::size_t documents = 0;
  std::size_t split_threshold = 2;
  std::vector<DocumentStats> per_document;
  AggregateStats mean;
  AggregateStats median;
};

// Document-parallel scoring with a deterministic ordered reduce.
CorpusReport corpus_report(const TokenizerModel& model, std::span<const PairedRecord> records,
                           std::size_t split_threshold = 2);

void save_corpus_report(const CorpusReport& report, std::span<const CorpusError> errors,
                        const std::map<std::string, std::string>& input_hashes,
                        const std::string& path);
std::string corpus_report_csv(const CorpusReport& report);

}  // namespace vs
