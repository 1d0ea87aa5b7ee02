#include "vs/candidates.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include <nlohmann/json.hpp>

#include "vs/corpus.hpp"
#include "vs/hash.hpp"
#include "vs/parallel.hpp"
#include "vs/tokenizer_io.hpp"
#include "vs/utf8.hpp"
#include "vs/version.hpp"

namespace vs {

namespace {

std::vector<char> membership(std::size_t n, const std::vector<TokenId>& ids) {
  std::vector<char> in(n, 0);
  for (TokenId id : ids) {
    if (id < n) in[id] = 1;
  }
  return in;
}

nlohmann::ordered_json provenance_json(const std::map<std::string, std::string>& input_hashes) {
  nlohmann::ordered_json p;
  p["tool"] = kToolName;
  p["version"] = kToolVersion;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  for (const auto& [name, hash] : input_hashes) inputs[name] = hash;
  p["inputs"] = std::move(inputs);
  return p;
}

}  // namespace

std::vector<TokenId> find_unreachable(const TokenizerModel& model) {
  const std::size_t n = model.vocab_size();
  std::vector<char> flags(n, 0);
  parallel_chunks(n, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      if (i < kByteTokenCount) continue;
      TokenId id = static_cast<TokenId>(i);
      auto ids = model.encode(model.token_bytes(id));
      if (ids.size() != 1 || ids[0] != id) flags[i] = 1;
    }
  });
  std::vector<TokenId> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (flags[i]) out.push_back(static_cast<TokenId>(i));
  }
  return out;
}

MergeDag build_merge_dag(const TokenizerModel& model) {
  MergeDag dag;
  dag.node_count = model.vocab_size();
  dag.children.assign(dag.node_count, {});
  std::vector<std::size_t> indegree(dag.node_count, 0);
  for (const MergeRule& m : model.merges()) {
    dag.children[m.left].push_back(m.result);
    dag.children[m.right].push_back(m.result);
    indegree[m.result] += 2;
    dag.edge_count += 2;
  }
  // Kahn pass; anything left over sits on a cycle.
  std::deque<TokenId> ready;
  std::size_t visited = 0;
  for (std::size_t i = 0; i < dag.node_count; ++i) {
    if (indegree[i] == 0) ready.push_back(static_cast<TokenId>(i));
  }
  while (!ready.empty()) {
    TokenId node = ready.front();
    ready.pop_front();
    ++visited;
    for (TokenId child : dag.children[node]) {
      if (--indegree[child] == 0) ready.push_back(child);
    }
  }
  if (visited != dag.node_count) {
    throw ValidationError("merge graph contains a cycle (corrupt merge list)");
  }
  return dag;
}

std::vector<TokenId> merge_dag_descendants(const MergeDag& dag, TokenId id) {
  std::vector<char> seen(dag.node_count, 0);
  std::vector<TokenId> stack{id};
  while (!stack.empty()) {
    TokenId node = stack.back();
    stack.pop_back();
    for (TokenId child : dag.children[node]) {
      if (!seen[child]) {
        seen[child] = 1;
        stack.push_back(child);
      }
    }
  }
  seen[id] = 0;
  std::vector<TokenId> out;
  for (std::size_t i = 0; i < dag.node_count; ++i) {
    if (seen[i]) out.push_back(static_cast<TokenId>(i));
  }
  return out;
}

NormProfile compute_norm_profile(const TokenizerModel& model, const EmbeddingMatrix& matrix,
                                 const std::vector<TokenId>& unreachable,
                                 const std::vector<TokenId>& user_excluded) {
  if (matrix.rows != model.vocab_size()) {
    throw InputError("matrix rows (" + std::to_string(matrix.rows) +
                     ") do not match vocabulary size (" + std::to_string(model.vocab_size()) + ")");
  }
  NormProfile profile;
  profile.norms.assign(matrix.rows, 0.0);
  profile.flags.assign(matrix.rows, 0);
  parallel_chunks(matrix.rows, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double sum = 0.0;
      for (float v : matrix.row(i)) sum += static_cast<double>(v) * static_cast<double>(v);
      profile.norms[i] = std::sqrt(sum);
      if (i < kByteTokenCount) {
        profile.flags[i] |= kFlagByteFallback;
      } else if (!is_valid_utf8(model.token_bytes(static_cast<TokenId>(i)))) {
        profile.flags[i] |= kFlagPartialUtf8;
      }
    }
  });
  for (TokenId id : unreachable) {
    if (id < profile.flags.size()) profile.flags[id] |= kFlagUnreachable;
  }
  for (TokenId id : user_excluded) {
    if (id < profile.flags.size()) profile.flags[id] |= kFlagUserExcluded;
  }
  return profile;
}

std::vector<TokenId> find_undertrained(const NormProfile& profile, const ThresholdConfig& cfg,
                                       double* threshold_out) {
  double threshold = cfg.value;
  if (cfg.mode == ThresholdConfig::Mode::percentile) {
    if (cfg.value <= 0.0 || cfg.value >= 100.0) {
      throw InputError("percentile must be in (0, 100)");
    }
    std::vector<double> eligible;
    eligible.reserve(profile.norms.size());
    for (std::size_t i = 0; i < profile.norms.size(); ++i) {
      if (!profile.excluded(static_cast<TokenId>(i))) eligible.push_back(profile.norms[i]);
    }
    if (eligible.empty()) {
      throw InputError("all tokens excluded from the norm population");
    }
    std::sort(eligible.begin(), eligible.end());
    // nearest-rank percentile: smallest value with at least value% of the
    // population at or below it
    std::size_t rank = static_cast<std::size_t>(
        std::ceil(cfg.value / 100.0 * static_cast<double>(eligible.size())));
    if (rank == 0) rank = 1;
    if (rank > eligible.size()) rank = eligible.size();
    threshold = eligible[rank - 1];
  }
  if (threshold_out) *threshold_out = threshold;
  std::vector<TokenId> out;
  for (std::size_t i = 0; i < profile.norms.size(); ++i) {
    TokenId id = static_cast<TokenId>(i);
    if (profile.excluded(id)) continue;
    if (profile.norms[i] < threshold) out.push_back(id);
  }
  return out;
}

std::vector<TokenId> filter_by_descendants(const MergeDag& dag,
                                           const std::vector<TokenId>& candidates) {
  std::vector<char> is_candidate = membership(dag.node_count, candidates);
  // Reverse-topological sweep: safe(n) <=> every child is a candidate and
  // itself safe; a node's full descendant cone is then inside the set.
  std::vector<std::size_t> outdegree(dag.node_count, 0);
  std::vector<std::vector<TokenId>> parents(dag.node_count);
  for (std::size_t i = 0; i < dag.node_count; ++i) {
    outdegree[i] = dag.children[i].size();
    for (TokenId child : dag.children[i]) parents[child].push_back(static_cast<TokenId>(i));
  }
  std::vector<char> safe(dag.node_count, 1);
  std::deque<TokenId> ready;
  for (std::size_t i = 0; i < dag.node_count; ++i) {
    if (outdegree[i] == 0) ready.push_back(static_cast<TokenId>(i));
  }
  while (!ready.empty()) {
    TokenId node = ready.front();
    ready.pop_front();
    for (TokenId child : dag.children[node]) {
      if (!is_candidate[child] || !safe[child]) safe[node] = 0;
    }
    for (TokenId parent : parents[node]) {
      if (--outdegree[parent] == 0) ready.push_back(parent);
    }
  }
  std::vector<TokenId> excluded;
  for (TokenId id : candidates) {
    if (!safe[id]) excluded.push_back(id);
  }
  return excluded;
}

CandidateReport candidate_set(const TokenizerModel& model, const EmbeddingMatrix& matrix,
                              const CandidateConfig& cfg) {
  if (cfg.use_unembedding_norms) {
    if (matrix.role != MatrixRole::unembedding) {
      throw InputError("unembedding norms requested but matrix role is embedding");
    }
  } else if (matrix.role != MatrixRole::embedding) {
    throw InputError("norm source must be the embedding matrix (pass the flag to use "
                     "unembedding norms)");
  }

  CandidateReport report;
  report.vocab_size = model.vocab_size();

  std::vector<TokenId> unreachable_raw = find_unreachable(model);
  NormProfile profile = compute_norm_profile(model, matrix, unreachable_raw, cfg.user_excluded);
  report.norms = profile.norms;

  std::vector<char> user = membership(model.vocab_size(), cfg.user_excluded);
  for (TokenId id : unreachable_raw) {
    if (!user[id]) report.unreachable.push_back(id);
  }
  report.undertrained = find_undertrained(profile, cfg.threshold, &report.threshold_value);

  report.reasons.assign(model.vocab_size(), 0);
  for (TokenId id : report.unreachable) report.reasons[id] |= kFlagUnreachable;
  for (TokenId id : report.undertrained) report.reasons[id] |= kFlagUndertrained;
  for (std::size_t i = 0; i < report.reasons.size(); ++i) {
    if (report.reasons[i]) report.union_ids.push_back(static_cast<TokenId>(i));
  }

  MergeDag dag = build_merge_dag(model);
  report.excluded = filter_by_descendants(dag, report.union_ids);
  std::vector<char> excluded = membership(model.vocab_size(), report.excluded);
  for (TokenId id : report.union_ids) {
    if (!excluded[id]) report.final_ids.push_back(id);
  }
  return report;
}

void save_candidate_report(const CandidateReport& report, const TokenizerModel& model,
                           const std::map<std::string, std::string>& input_hashes,
                           const std::string& path) {
  nlohmann::ordered_json j;
  j["provenance"] = provenance_json(input_hashes);
  j["provenance"]["base_tokenizer_canonical"] = model_content_hash(model);
  j["vocab_size"] = report.vocab_size;
  j["threshold_value"] = report.threshold_value;
  nlohmann::ordered_json counts;
  counts["unreachable"] = report.unreachable.size();
  counts["undertrained"] = report.undertrained.size();
  counts["union"] = report.union_ids.size();
  counts["excluded"] = report.excluded.size();
  counts["final"] = report.final_ids.size();
  j["counts"] = std::move(counts);

  std::vector<char> excluded = membership(report.vocab_size, report.excluded);
  std::vector<char> final_in = membership(report.vocab_size, report.final_ids);
  nlohmann::ordered_json tokens = nlohmann::ordered_json::array();
  for (TokenId id : report.union_ids) {
    nlohmann::ordered_json entry;
    entry["id"] = id;
    entry["token"] = token_surface(model.token_bytes(id));
    nlohmann::ordered_json reasons = nlohmann::ordered_json::array();
    if (report.reasons[id] & kFlagUnreachable) reasons.push_back("unreachable");
    if (report.reasons[id] & kFlagUndertrained) reasons.push_back("undertrained");
    entry["reasons"] = std::move(reasons);
    entry["norm"] = report.norms[id];
    entry["excluded"] = static_cast<bool>(excluded[id]);
    entry["final"] = static_cast<bool>(final_in[id]);
    tokens.push_back(std::move(entry));
  }
  j["tokens"] = std::move(tokens);
  write_file_bytes(path, j.dump(2) + "\n");
}

CandidateReportFile load_candidate_report(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file_bytes(path));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed candidate report: ") + e.what());
  }
  CandidateReportFile file;
  if (j.contains("provenance") && j["provenance"].contains("base_tokenizer_canonical")) {
    file.base_tokenizer_hash = j["provenance"]["base_tokenizer_canonical"].get<std::string>();
  }
  if (!j.contains("vocab_size") || !j.contains("tokens")) {
    throw InputError("candidate report missing vocab_size/tokens: " + path);
  }
  CandidateReport& report = file.report;
  report.vocab_size = j["vocab_size"].get<std::size_t>();
  report.threshold_value = j.value("threshold_value", 0.0);
  report.reasons.assign(report.vocab_size, 0);
  report.norms.assign(report.vocab_size, 0.0);
  for (const auto& entry : j["tokens"]) {
    TokenId id = entry["id"].get<TokenId>();
    if (id >= report.vocab_size) {
      throw InputError("candidate report token id out of range: " + std::to_string(id));
    }
    for (const auto& reason : entry["reasons"]) {
      const std::string r = reason.get<std::string>();
      if (r == "unreachable") {
        report.reasons[id] |= kFlagUnreachable;
        report.unreachable.push_back(id);
      } else if (r == "undertrained") {
        report.reasons[id] |= kFlagUndertrained;
        report.undertrained.push_back(id);
      }
    }
    report.norms[id] = entry.value("norm", 0.0);
    report.union_ids.push_back(id);
    if (entry.value("excluded", false)) report.excluded.push_back(id);
    if (entry.value("final", false)) report.final_ids.push_back(id);
  }
  return file;
}

}  // namespace vs
