#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vs/embedding.hpp"
#include "vs/tokenizer.hpp"
#include "vs/types.hpp"

namespace vs {

// Reason / exclusion bits, also used in report serialization.
enum : std::uint8_t {
  kFlagPartialUtf8 = 1u << 0,
  kFlagByteFallback = 1u << 1,
  kFlagUnreachable = 1u << 2,
  kFlagUserExcluded = 1u << 3,
  kFlagUndertrained = 1u << 4,
};

// Per-token embedding L2 norms plus the exclusion flags that keep a token
// out of the undertrained percentile population.
struct NormProfile {
  std::vector<double> norms;
  std::vector<std::uint8_t> flags;

  bool excluded(TokenId id) const {
    return (flags[id] & (kFlagPartialUtf8 | kFlagByteFallback | kFlagUnreachable |
                         kFlagUserExcluded)) != 0;
  }
};

// Contributor -> product graph over merge rules. children[i] lists the
// products whose rule uses token i as left or right operand (twice when a
// rule uses the same token on both sides), so the total edge count is
// exactly 2 * merge count.
struct MergeDag {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::vector<std::vector<TokenId>> children;
};

struct ThresholdConfig {
  enum class Mode { percentile, absolute };
  Mode mode = Mode::percentile;
  double value = 2.0;
};

struct CandidateConfig {
  ThresholdConfig threshold;
  bool use_unembedding_norms = false;
  std::vector<TokenId> user_excluded;  // shielded from candidacy entirely
};

// Output of the full candidate computation. All id vectors are sorted
// ascending; `final_ids` = (unreachable ∪ undertrained) \ excluded.
struct CandidateReport {
  std::size_t vocab_size = 0;
  double threshold_value = 0.0;
  std::vector<TokenId> unreachable;
  std::vector<TokenId> undertrained;
  std::vector<TokenId> union_ids;
  std::vector<TokenId> excluded;
  std::vector<TokenId> final_ids;
  std::vector<std::uint8_t> reasons;  // per id, kFlagUnreachable | kFlagUndertrained
  std::vector<double> norms;          // per id
};

// Exactly { t : encode(decode([t])) != [t] }, byte-fallback ids omitted.
std::vector<TokenId> find_unreachable(const TokenizerModel& model);

// Throws ValidationError on a cycle (corrupt merge list).
MergeDag build_merge_dag(const TokenizerModel& model);

// All nodes reachable from id (id itself excluded), sorted ascending.
std::vector<TokenId> merge_dag_descendants(const MergeDag& dag, TokenId id);

NormProfile compute_norm_profile(const TokenizerModel& model, const EmbeddingMatrix& matrix,
                                 const std::vector<TokenId>& unreachable,
                                 const std::vector<TokenId>& user_excluded);

// Tokens whose norm is strictly below the threshold. In percentile mode the
// threshold is the nearest-rank percentile of the non-excluded population;
// its value is written to *threshold_out when non-null. Throws InputError
// when every token is excluded.
std::vector<TokenId> find_undertrained(const NormProfile& profile, const ThresholdConfig& cfg,
                                       double* threshold_out = nullptr);

// V_exclude: candidates with at least one descendant outside the candidate
// set. Single reverse-topological pass.
std::vector<TokenId> filter_by_descendants(const MergeDag& dag,
                                           const std::vector<TokenId>& candidates);

CandidateReport candidate_set(const TokenizerModel& model, const EmbeddingMatrix& matrix,
                              const CandidateConfig& cfg);

// JSON (de)serialization. Provenance carries input hashes; the base
// tokenizer hash is checked again before surgery.
struct CandidateReportFile {
  CandidateReport report;
  std::string base_tokenizer_hash;
};

void save_candidate_report(const CandidateReport& report, const TokenizerModel& model,
                           const std::map<std::string, std::string>& input_hashes,
                           const std::string& path);
CandidateReportFile load_candidate_report(const std::string& path);

}  // namespace vs
