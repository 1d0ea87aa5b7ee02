#include "vs/domain_vocab.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "vs/corpus.hpp"
#include "vs/tokenizer_io.hpp"

namespace vs {

bool is_alphabetic_token(std::string_view token) {
  if (token.empty()) return false;
  for (unsigned char c : token) {
    if (!((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'))) return false;
  }
  return true;
}

DomainVocabulary build_domain_vocab(const TokenizerModel& domain_model,
                                    const TokenizerModel& base_model,
                                    std::span<const std::string> corpus, std::size_t budget,
                                    bool refine) {
  if (budget == 0) throw InputError("budget must be >= 1");

  std::vector<std::uint64_t> freqs = token_frequencies(domain_model, corpus);

  DomainVocabulary vocab;
  vocab.budget = budget;
  for (std::size_t i = kByteTokenCount; i < domain_model.vocab_size(); ++i) {
    TokenId id = static_cast<TokenId>(i);
    const std::string& token = domain_model.token_bytes(id);
    if (base_model.contains(token)) continue;
    if (refine && !is_alphabetic_token(token)) continue;
    DomainVocabEntry entry;
    entry.token = token;
    entry.frequency = freqs[id];
    auto rank = domain_model.producing_rank(id);
    entry.merge_rank = rank ? static_cast<std::int64_t>(*rank) : -1;
    vocab.entries.push_back(std::move(entry));
  }
  std::stable_sort(vocab.entries.begin(), vocab.entries.end(),
                   [](const DomainVocabEntry& a, const DomainVocabEntry& b) {
                     if (a.frequency != b.frequency) return a.frequency > b.frequency;
                     return a.merge_rank < b.merge_rank;
                   });
  if (vocab.entries.size() > budget) vocab.entries.resize(budget);
  return vocab;
}

std::string save_domain_vocab(const DomainVocabulary& vocab) {
  std::string out;
  for (const DomainVocabEntry& entry : vocab.entries) {
    nlohmann::ordered_json j;
    j["token"] = token_surface(entry.token);
    j["freq"] = entry.frequency;
    j["rank"] = entry.merge_rank;
    out += j.dump();
    out += '\n';
  }
  return out;
}

void save_domain_vocab_file(const DomainVocabulary& vocab, const std::string& path) {
  write_file_bytes(path, save_domain_vocab(vocab));
}

DomainVocabulary load_domain_vocab_file(const std::string& path) {
  DomainVocabulary vocab;
  std::size_t line_no = 0;
  std::string bytes = read_file_bytes(path);
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string::npos) nl = bytes.size();
    std::string_view line(bytes.data() + pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("token") || !j.contains("freq") ||
        !j.contains("rank")) {
      throw InputError("malformed domain vocab entry at line " + std::to_string(line_no));
    }
    DomainVocabEntry entry;
    entry.token = surface_to_token(j["token"].get<std::string>());
    entry.frequency = j["freq"].get<std::uint64_t>();
    entry.merge_rank = j["rank"].get<std::int64_t>();
    vocab.entries.push_back(std::move(entry));
  }
  vocab.budget = vocab.entries.size();
  return vocab;
}

}  // namespace vs
