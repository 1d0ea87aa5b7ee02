#include "vs/surgery.hpp"

#include <algorithm>
#include <limits>

#include <nlohmann/json.hpp>

#include "vs/corpus.hpp"
#include "vs/tokenizer_io.hpp"
#include "vs/version.hpp"

namespace vs {

namespace {

nlohmann::ordered_json provenance_json(const std::map<std::string, std::string>& input_hashes) {
  nlohmann::ordered_json p;
  p["tool"] = kToolName;
  p["version"] = kToolVersion;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  for (const auto& [name, hash] : input_hashes) inputs[name] = hash;
  p["inputs"] = std::move(inputs);
  return p;
}

std::string pair_str_key(const std::string& left, const std::string& right) {
  return std::to_string(left.size()) + "|" + left + right;
}

// Simulates the post-surgery encoder while chains are being planned:
// surviving base merges at their original ranks, added merges after them in
// placement order. Working on token strings (not base ids) lets new tokens
// participate as symbols. Chains derived this way are reachable by
// construction — each emitted merge is verified to fire by re-encoding.
class ChainSim {
 public:
  ChainSim(const TokenizerModel& base, const std::unordered_set<std::string>* consumed)
      : base_(base), consumed_(consumed) {
    for (std::size_t rank = 0; rank < base.merges().size(); ++rank) {
      const MergeRule& m = base.merges()[rank];
      if (consumed_ && consumed_->count(base.token_bytes(m.result))) continue;  // rule retired
      pair_rank_.emplace(pair_str_key(base.token_bytes(m.left), base.token_bytes(m.right)),
                         rank);
      product_of_rank_.emplace(rank, base.token_bytes(m.result));
    }
    next_rank_ = base.merges().size();
  }

  bool exists(const std::string& token) const {
    if (placed_.count(token)) return true;
    if (consumed_ && consumed_->count(token)) return false;
    return base_.contains(token);
  }

  void register_link(const ChainLink& link) {
    placed_.insert(link.token);
    pair_rank_.emplace(pair_str_key(link.left, link.right), next_rank_);
    product_of_rank_.emplace(next_rank_, link.token);
    ++next_rank_;
  }

  std::vector<std::string> encode(const std::string& word) const {
    std::vector<std::string> syms;
    syms.reserve(word.size());
    for (char c : word) syms.emplace_back(1, c);
    while (syms.size() > 1) {
      std::size_t best_rank = std::numeric_limits<std::size_t>::max();
      std::size_t best_pos = 0;
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        auto it = pair_rank_.find(pair_str_key(syms[i], syms[i + 1]));
        if (it != pair_rank_.end() && it->second < best_rank) {
          best_rank = it->second;
          best_pos = i;
        }
      }
      if (best_rank == std::numeric_limits<std::size_t>::max()) break;
      const std::string& left = syms[best_pos];
      const std::string& right = syms[best_pos + 1];
      const std::string& product = product_of_rank_.at(best_rank);
      std::vector<std::string> next;
      next.reserve(syms.size());
      for (std::size_t i = 0; i < syms.size();) {
        if (i + 1 < syms.size() && syms[i] == left && syms[i + 1] == right) {
          next.push_back(product);
          i += 2;
        } else {
          next.push_back(std::move(syms[i]));
          ++i;
        }
      }
      syms = std::move(next);
    }
    return syms;
  }

  // Emits the merges that make `token` encode to a single unit, simulating
  // after every addition. Prefers the leftmost fold step; when a pair's
  // concatenation collides with an existing token string (which already has
  // a producer or must survive untouched) the fold routes through the next
  // addable pair instead.
  std::vector<ChainLink> chain(const std::string& token) {
    std::vector<ChainLink> links;
    if (exists(token)) return links;
    for (;;) {
      std::vector<std::string> syms = encode(token);
      if (syms.size() == 1) {
        if (syms[0] != token) {
          throw ValidationError("chain simulation converged to a foreign token for " +
                                token_surface(token));
        }
        break;
      }
      bool emitted = false;
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        std::string concat = syms[i] + syms[i + 1];
        if (exists(concat)) continue;
        ChainLink link{concat, syms[i], syms[i + 1]};
        register_link(link);
        links.push_back(std::move(link));
        emitted = true;
        break;
      }
      if (!emitted) {
        throw ValidationError("cannot materialize " + token_surface(token) +
                              ": every fold step collides with an existing token");
      }
    }
    return links;
  }

 private:
  const TokenizerModel& base_;
  const std::unordered_set<std::string>* consumed_;
  std::unordered_set<std::string> placed_;
  std::unordered_map<std::string, std::size_t> pair_rank_;
  std::unordered_map<std::size_t, std::string> product_of_rank_;
  std::size_t next_rank_ = 0;
};

struct PlanPass {
  std::vector<ChainLink> new_tokens;  // placement order
};

// One planning sweep with a fixed set of consumed (soon-removed) base
// tokens. Entries go in domain merge-rank order; each entry contributes its
// chain, intermediates first.
PlanPass plan_pass(const TokenizerModel& base, const std::vector<DomainVocabEntry>& ordered,
                   const std::unordered_set<std::string>& consumed) {
  PlanPass pass;
  ChainSim sim(base, &consumed);
  for (const DomainVocabEntry& entry : ordered) {
    if (base.contains(entry.token) && !consumed.count(entry.token)) {
      throw InputError("domain entry already in base vocabulary: " + token_surface(entry.token));
    }
    auto links = sim.chain(entry.token);  // empty when already placed as an intermediate
    for (ChainLink& link : links) pass.new_tokens.push_back(std::move(link));
  }
  return pass;
}

}  // namespace

std::vector<ChainLink> materialize_merge_chain(const TokenizerModel& base,
                                               std::span<const ChainLink> placed,
                                               const std::string& token,
                                               const std::unordered_set<std::string>* unavailable) {
  ChainSim sim(base, unavailable);
  for (const ChainLink& link : placed) sim.register_link(link);
  if (base.contains(token) && (!unavailable || !unavailable->count(token))) {
    return {};  // already a single unit, nothing to add
  }
  return sim.chain(token);
}

SurgeryPlan plan_surgery(const TokenizerModel& base, const CandidateReport& candidates,
                         const DomainVocabulary& domain) {
  if (candidates.vocab_size != base.vocab_size()) {
    throw InputError("candidate report vocabulary size does not match base model");
  }
  for (TokenId slot : candidates.final_ids) {
    if (slot < kByteTokenCount) {
      throw InputError("candidate slot " + std::to_string(slot) + " is a byte-fallback id");
    }
  }

  std::vector<DomainVocabEntry> ordered(domain.entries.begin(), domain.entries.end());
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const DomainVocabEntry& a, const DomainVocabEntry& b) {
                     if (a.merge_rank != b.merge_rank) return a.merge_rank < b.merge_rank;
                     return a.token < b.token;
                   });

  std::vector<TokenId> slots(candidates.final_ids);
  std::sort(slots.begin(), slots.end());

  // How many slots get consumed depends on the total new-token count, which
  // depends on which base tokens still anchor chains. Iterate to a fixed
  // point; in practice the second pass already agrees with the first.
  std::size_t consumed_count = 0;
  PlanPass pass;
  for (int iter = 0;; ++iter) {
    std::unordered_set<std::string> consumed;
    for (std::size_t i = 0; i < consumed_count; ++i) consumed.insert(base.token_bytes(slots[i]));
    pass = plan_pass(base, ordered, consumed);
    std::size_t next = std::min(slots.size(), pass.new_tokens.size());
    if (next == consumed_count) break;
    if (iter > 50) {
      throw ValidationError("slot consumption failed to converge while planning surgery");
    }
    consumed_count = next;
  }

  SurgeryPlan plan;
  plan.base_vocab_size = base.vocab_size();
  TokenId next_fresh = static_cast<TokenId>(base.vocab_size());
  for (std::size_t i = 0; i < pass.new_tokens.size(); ++i) {
    const ChainLink& link = pass.new_tokens[i];
    plan.added_merges.push_back({link.left, link.right});
    auto ids = base.encode(link.token);
    auto& parents = plan.chain_parents[link.token];
    parents.reserve(ids.size());
    for (TokenId id : ids) parents.push_back(base.token_bytes(id));
    if (i < consumed_count) {
      TokenId slot = slots[i];
      bool reachable =
          slot < candidates.reasons.size() && !(candidates.reasons[slot] & kFlagUnreachable);
      plan.replacements.push_back({slot, base.token_bytes(slot), link.token, reachable});
    } else {
      plan.expansions.push_back({next_fresh++, link.token});
    }
  }
  return plan;
}

TokenizerModel apply_surgery(const TokenizerModel& base, const SurgeryPlan& plan) {
  if (plan.base_vocab_size != base.vocab_size()) {
    throw ValidationError("plan was computed against a different base vocabulary size");
  }
  std::vector<std::string> vocab;
  vocab.reserve(base.vocab_size() + plan.expansions.size());
  for (std::size_t i = 0; i < base.vocab_size(); ++i) {
    vocab.push_back(base.token_bytes(static_cast<TokenId>(i)));
  }

  std::vector<char> replaced(base.vocab_size(), 0);
  for (const Replacement& r : plan.replacements) {
    if (r.slot >= base.vocab_size() || replaced[r.slot]) {
      throw ValidationError("invalid or duplicate replacement slot " + std::to_string(r.slot));
    }
    if (vocab[r.slot] != r.old_token) {
      throw ValidationError("plan/base mismatch: slot " + std::to_string(r.slot) +
                            " does not hold the expected token");
    }
    replaced[r.slot] = 1;
    vocab[r.slot] = r.new_token;
  }
  for (const Expansion& e : plan.expansions) {
    if (e.id != vocab.size()) {
      throw ValidationError("expansion ids must extend the vocabulary densely");
    }
    vocab.push_back(e.token);
  }

  std::vector<std::pair<std::string, std::string>> merges;
  merges.reserve(base.merges().size() + plan.added_merges.size());
  for (const MergeRule& m : base.merges()) {
    if (replaced[m.result]) continue;  // slot recycled, rule retired
    merges.emplace_back(base.token_bytes(m.left), base.token_bytes(m.right));
  }
  for (const AddedMerge& m : plan.added_merges) {
    merges.emplace_back(m.left, m.right);
  }
  // Full revalidation; any dangling reference here means the plan and base
  // do not belong together.
  return TokenizerModel::build(std::move(vocab), merges, base.config());
}

std::uint64_t parameter_delta(const SurgeryPlan& plan, std::size_t hidden_dim) {
  return 2ull * plan.expansions.size() * hidden_dim;
}

SurgeryReport make_surgery_report(const SurgeryPlan& plan, std::size_t hidden_dim) {
  SurgeryReport report = surgery_accounting(
      plan.base_vocab_size, plan.replacements.size(),
      plan.replacements.size() + plan.expansions.size(), hidden_dim);
  for (const Replacement& r : plan.replacements) {
    if (r.old_was_reachable) report.replaced_reachable.push_back(token_surface(r.old_token));
  }
  return report;
}

SurgeryReport surgery_accounting(std::size_t base_vocab, std::size_t candidate_count,
                                 std::size_t total_new, std::size_t hidden_dim) {
  SurgeryReport report;
  report.base_vocab_size = base_vocab;
  report.replaced_count = std::min(candidate_count, total_new);
  report.expanded_count = total_new - report.replaced_count;
  report.total_new_tokens = total_new;
  report.final_vocab_size = base_vocab + report.expanded_count;
  report.hidden_dim = hidden_dim;
  report.parameter_delta = 2ull * report.expanded_count * hidden_dim;
  report.no_replace_parameter_delta = 2ull * total_new * hidden_dim;
  report.percent_saved =
      report.no_replace_parameter_delta == 0
          ? 0.0
          : 100.0 * (1.0 - static_cast<double>(report.parameter_delta) /
                               static_cast<double>(report.no_replace_parameter_delta));
  return report;
}

void save_surgery_plan(const SurgeryPlan& plan,
                       const std::map<std::string, std::string>& input_hashes,
                       const std::string& path) {
  nlohmann::ordered_json j;
  j["provenance"] = provenance_json(input_hashes);
  j["base_vocab_size"] = plan.base_vocab_size;
  nlohmann::ordered_json replacements = nlohmann::ordered_json::array();
  for (const Replacement& r : plan.replacements) {
    nlohmann::ordered_json e;
    e["slot"] = r.slot;
    e["old_token"] = token_surface(r.old_token);
    e["new_token"] = token_surface(r.new_token);
    e["old_reachable"] = r.old_was_reachable;
    replacements.push_back(std::move(e));
  }
  j["replacements"] = std::move(replacements);
  nlohmann::ordered_json expansions = nlohmann::ordered_json::array();
  for (const Expansion& e : plan.expansions) {
    nlohmann::ordered_json x;
    x["id"] = e.id;
    x["token"] = token_surface(e.token);
    expansions.push_back(std::move(x));
  }
  j["expansions"] = std::move(expansions);
  nlohmann::ordered_json merges = nlohmann::ordered_json::array();
  for (const AddedMerge& m : plan.added_merges) {
    merges.push_back(token_surface(m.left) + " " + token_surface(m.right));
  }
  j["added_merges"] = std::move(merges);
  nlohmann::ordered_json parents = nlohmann::ordered_json::object();
  for (const auto& [token, constituents] : plan.chain_parents) {
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (const std::string& c : constituents) list.push_back(token_surface(c));
    parents[token_surface(token)] = std::move(list);
  }
  j["chain_parents"] = std::move(parents);
  write_file_bytes(path, j.dump(2) + "\n");
}

SurgeryPlan load_surgery_plan(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file_bytes(path));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed surgery plan: ") + e.what());
  }
  SurgeryPlan plan;
  try {
    plan.base_vocab_size = j.at("base_vocab_size").get<std::size_t>();
    for (const auto& e : j.at("replacements")) {
      Replacement r;
      r.slot = e.at("slot").get<TokenId>();
      r.old_token = surface_to_token(e.at("old_token").get<std::string>());
      r.new_token = surface_to_token(e.at("new_token").get<std::string>());
      r.old_was_reachable = e.value("old_reachable", false);
      plan.replacements.push_back(std::move(r));
    }
    for (const auto& e : j.at("expansions")) {
      Expansion x;
      x.id = e.at("id").get<TokenId>();
      x.token = surface_to_token(e.at("token").get<std::string>());
      plan.expansions.push_back(std::move(x));
    }
    for (const auto& e : j.at("added_merges")) {
      const std::string line = e.get<std::string>();
      std::size_t sep = line.find(' ');
      if (sep == std::string::npos) throw InputError("malformed added merge: " + line);
      plan.added_merges.push_back(
          {surface_to_token(line.substr(0, sep)), surface_to_token(line.substr(sep + 1))});
    }
    if (j.contains("chain_parents")) {
      for (auto it = j["chain_parents"].begin(); it != j["chain_parents"].end(); ++it) {
        std::vector<std::string> constituents;
        for (const auto& c : it.value()) {
          constituents.push_back(surface_to_token(c.get<std::string>()));
        }
        plan.chain_parents[surface_to_token(it.key())] = std::move(constituents);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed surgery plan: ") + e.what());
  }
  return plan;
}

void save_surgery_report(const SurgeryReport& report,
                         const std::map<std::string, std::string>& input_hashes,
                         const std::string& path) {
  nlohmann::ordered_json j;
  j["provenance"] = provenance_json(input_hashes);
  j["base_vocab_size"] = report.base_vocab_size;
  j["final_vocab_size"] = report.final_vocab_size;
  j["replaced_count"] = report.replaced_count;
  j["expanded_count"] = report.expanded_count;
  j["total_new_tokens"] = report.total_new_tokens;
  j["hidden_dim"] = report.hidden_dim;
  j["parameter_delta"] = report.parameter_delta;
  j["no_replace_parameter_delta"] = report.no_replace_parameter_delta;
  j["percent_saved"] = report.percent_saved;
  nlohmann::ordered_json reachable = nlohmann::ordered_json::array();
  for (const std::string& t : report.replaced_reachable) reachable.push_back(t);
  j["replaced_reachable"] = std::move(reachable);
  write_file_bytes(path, j.dump(2) + "\n");
}

}  // namespace vs
