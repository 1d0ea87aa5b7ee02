#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "vs/candidates.hpp"
#include "vs/domain_vocab.hpp"
#include "vs/tokenizer.hpp"

namespace vs {

struct Replacement {
  TokenId slot = 0;  // recycled candidate id
  std::string old_token;
  std::string new_token;
  bool old_was_reachable = false;  // undertrained-only slots change encodings
};

struct Expansion {
  TokenId id = 0;  // appended id, >= base vocab size
  std::string token;
};

// result = left + right; appended after all surviving base merges.
struct AddedMerge {
  std::string left;
  std::string right;
};

struct ChainLink {
  std::string token;
  std::string left;
  std::string right;
};

struct SurgeryPlan {
  std::size_t base_vocab_size = 0;
  std::vector<Replacement> replacements;  // placement order
  std::vector<Expansion> expansions;      // placement order
  std::vector<AddedMerge> added_merges;   // one per new token, placement order
  // new token -> base-tokenizer decomposition, the constituents used for
  // embedding initialization (intermediates included).
  std::map<std::string, std::vector<std::string>> chain_parents;
};

struct SurgeryReport {
  std::size_t base_vocab_size = 0;
  std::size_t final_vocab_size = 0;
  std::size_t replaced_count = 0;
  std::size_t expanded_count = 0;
  std::size_t total_new_tokens = 0;
  std::size_t hidden_dim = 0;
  std::uint64_t parameter_delta = 0;             // 2 * expanded * d
  std::uint64_t no_replace_parameter_delta = 0;  // 2 * total_new * d
  double percent_saved = 0.0;                    // vs the no-replace baseline
  std::vector<std::string> replaced_reachable;   // audit list, surface form
};

// Intermediates (and the token itself) needed so `token` becomes a single
// unit: fold the token's decomposition left to right, emitting every
// concatenation not already available, and verify each step by re-encoding
// under the extended merge set so the finished token is reachable by
// construction. `placed` holds the links added earlier in the plan (their
// merges participate in the simulation); `unavailable` marks base tokens
// scheduled for replacement, which must not anchor new merges. Returns an
// empty chain when the token already resolves to one available unit.
std::vector<ChainLink> materialize_merge_chain(
    const TokenizerModel& base, std::span<const ChainLink> placed, const std::string& token,
    const std::unordered_set<std::string>* unavailable = nullptr);

// Replacement-then-expansion planning: domain entries in domain merge-rank
// order, chain intermediates immediately before their product, candidate
// slots consumed in ascending id order until exhausted, remainder appended.
SurgeryPlan plan_surgery(const TokenizerModel& base, const CandidateReport& candidates,
                         const DomainVocabulary& domain);

// Executes the plan and re-validates the result from scratch. Surviving
// merges keep their relative order; merges producing replaced tokens are
// dropped (the DAG filter guarantees no surviving rule references one).
TokenizerModel apply_surgery(const TokenizerModel& base, const SurgeryPlan& plan);

std::uint64_t parameter_delta(const SurgeryPlan& plan, std::size_t hidden_dim);

SurgeryReport make_surgery_report(const SurgeryPlan& plan, std::size_t hidden_dim);

// The accounting alone, from externally supplied counts (e.g. published
// model sizes): replaced = min(candidate_count, total_new), the rest
// expands the vocabulary at 2*d parameters per token.
SurgeryReport surgery_accounting(std::size_t base_vocab, std::size_t candidate_count,
                                 std::size_t total_new, std::size_t hidden_dim);

void save_surgery_plan(const SurgeryPlan& plan,
                       const std::map<std::string, std::string>& input_hashes,
                       const std::string& path);
SurgeryPlan load_surgery_plan(const std::string& path);

void save_surgery_report(const SurgeryReport& report,
                         const std::map<std::string, std::string>& input_hashes,
                         const std::string& path);

}  // namespace vs
