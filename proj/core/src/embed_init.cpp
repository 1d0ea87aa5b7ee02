#include "vs/embed_init.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "vs/corpus.hpp"
#include "vs/parallel.hpp"
#include "vs/tokenizer_io.hpp"
#include "vs/version.hpp"

namespace vs {

namespace {

// Mean of the constituent rows of `src`, accumulated in double, written as
// f32 into `dst`. Returns the L2 norm of the written row.
double write_mean_row(const EmbeddingMatrix& src, const std::vector<TokenId>& constituents,
                      std::span<float> dst) {
  const std::size_t cols = src.cols;
  std::vector<double> acc(cols, 0.0);
  for (TokenId id : constituents) {
    auto row = src.row(id);
    for (std::size_t j = 0; j < cols; ++j) acc[j] += static_cast<double>(row[j]);
  }
  const double inv = 1.0 / static_cast<double>(constituents.size());
  double norm_sq = 0.0;
  for (std::size_t j = 0; j < cols; ++j) {
    double v = acc[j] * inv;
    if (!std::isfinite(v)) {
      throw ValidationError("non-finite value while initializing a new embedding row");
    }
    dst[j] = static_cast<float>(v);
    norm_sq += static_cast<double>(dst[j]) * static_cast<double>(dst[j]);
  }
  return std::sqrt(norm_sq);
}

}  // namespace

InitResult init_new_rows(const TokenizerModel& base_model, const SurgeryPlan& plan,
                         const EmbeddingMatrix& embedding, const EmbeddingMatrix& unembedding) {
  if (embedding.role != MatrixRole::embedding || unembedding.role != MatrixRole::unembedding) {
    throw InputError("matrix roles are swapped or mislabeled");
  }
  if (embedding.rows != base_model.vocab_size() || unembedding.rows != base_model.vocab_size()) {
    throw InputError("matrix rows must match the base vocabulary size");
  }
  if (embedding.cols != unembedding.cols) {
    throw InputError("embedding and unembedding dimensions differ");
  }

  const std::size_t final_rows = base_model.vocab_size() + plan.expansions.size();
  InitResult result;
  result.embedding = EmbeddingMatrix(final_rows, embedding.cols, MatrixRole::embedding);
  result.unembedding = EmbeddingMatrix(final_rows, unembedding.cols, MatrixRole::unembedding);
  std::copy(embedding.data.begin(), embedding.data.end(), result.embedding.data.begin());
  std::copy(unembedding.data.begin(), unembedding.data.end(), result.unembedding.data.begin());

  struct Target {
    std::string token;
    TokenId id;
    bool replaced;
  };
  std::vector<Target> targets;
  targets.reserve(plan.replacements.size() + plan.expansions.size());
  for (const Replacement& r : plan.replacements) targets.push_back({r.new_token, r.slot, true});
  for (std::size_t i = 0; i < plan.expansions.size(); ++i) {
    const Expansion& e = plan.expansions[i];
    if (e.id != base_model.vocab_size() + i) {
      throw ValidationError("expansion ids must extend the vocabulary densely");
    }
    targets.push_back({e.token, e.id, false});
  }
  // each new token owns exactly one row; a duplicate would race below
  std::vector<char> seen(final_rows, 0);
  for (const Target& t : targets) {
    if (t.id >= final_rows || seen[t.id]) {
      throw ValidationError("plan names row " + std::to_string(t.id) + " more than once");
    }
    seen[t.id] = 1;
  }

  result.report.entries.resize(targets.size());
  // Constituents always read the immutable base matrices, so rows can be
  // written in any order and in parallel.
  parallel_chunks(targets.size(), [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Target& t = targets[i];
      if (t.id >= final_rows) {
        throw ValidationError("plan names a row past the final vocabulary size");
      }
      InitEntry entry;
      entry.token = t.token;
      entry.new_id = t.id;
      entry.replaced = t.replaced;
      entry.constituents = base_model.encode(t.token);
      if (entry.constituents.empty()) {
        throw ValidationError("empty constituent list for " + token_surface(t.token));
      }
      entry.embedding_norm =
          write_mean_row(embedding, entry.constituents, result.embedding.row(t.id));
      entry.unembedding_norm =
          write_mean_row(unembedding, entry.constituents, result.unembedding.row(t.id));
      result.report.entries[i] = std::move(entry);
    }
  });
  for (const InitEntry& entry : result.report.entries) {
    if (entry.replaced) {
      ++result.report.replaced_rows;
    } else {
      ++result.report.appended_rows;
    }
  }
  return result;
}

void save_init_report(const InitReport& report,
                      const std::map<std::string, std::string>& input_hashes,
                      const std::string& path) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json p;
  p["tool"] = kToolName;
  p["version"] = kToolVersion;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  for (const auto& [name, hash] : input_hashes) inputs[name] = hash;
  p["inputs"] = std::move(inputs);
  j["provenance"] = std::move(p);
  j["replaced_rows"] = report.replaced_rows;
  j["appended_rows"] = report.appended_rows;
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  for (const InitEntry& e : report.entries) {
    nlohmann::ordered_json x;
    x["token"] = token_surface(e.token);
    x["id"] = e.new_id;
    x["replaced"] = e.replaced;
    x["constituents"] = e.constituents;
    x["embedding_norm"] = e.embedding_norm;
    x["unembedding_norm"] = e.unembedding_norm;
    entries.push_back(std::move(x));
  }
  j["tokens"] = std::move(entries);
  write_file_bytes(path, j.dump(2) + "\n");
}

}  // namespace vs
