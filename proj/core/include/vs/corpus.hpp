#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace vs {

// One source-document / reference-summary pair.
struct PairedRecord {
  std::string id;
  std::string sd;
  std::string rs;
};

struct CorpusError {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct PairedCorpus {
  std::vector<PairedRecord> records;
  std::vector<CorpusError> errors;  // malformed lines, processing continued
};

// JSON lines, one record per line: {"id":"...","sd":"...","rs":"..."}.
// Malformed lines are reported with their line number and skipped;
// duplicate ids are an InputError.
PairedCorpus read_paired_corpus(const std::string& path);
void write_paired_corpus(const std::vector<PairedRecord>& records, const std::string& path);

// Plain-text corpus, one document per line; blank lines are dropped.
std::vector<std::string> read_text_corpus(const std::string& path);

std::string read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, std::string_view bytes);

}  // namespace vs
