#include "vs/splits.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "vs/metrics.hpp"
#include "vs/parallel.hpp"
#include "vs/version.hpp"

namespace vs {

namespace {

// Unbiased draw in [0, bound) by rejection; stays identical across
// platforms, unlike std::uniform_int_distribution.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return draw % bound;
}

void require_unique_ids(std::span<const PairedRecord> records) {
  std::unordered_set<std::string> seen;
  for (const PairedRecord& r : records) {
    if (!seen.insert(r.id).second) throw InputError("duplicate document id: " + r.id);
  }
}

}  // namespace

const char* split_kind_name(SplitKind kind) {
  switch (kind) {
    case SplitKind::random_split:
      return "random";
    case SplitKind::oov_sd:
      return "oov_sd";
    case SplitKind::oov_rs:
      return "oov_rs";
  }
  return "random";
}

SplitKind split_kind_from_name(const std::string& name) {
  if (name == "random") return SplitKind::random_split;
  if (name == "oov_sd") return SplitKind::oov_sd;
  if (name == "oov_rs") return SplitKind::oov_rs;
  throw InputError("unknown split kind: " + name);
}

SplitManifest split_oov(std::span<const PairedRecord> records, const TokenizerModel& model,
                        SplitKind side, double top_frac, std::size_t split_threshold) {
  if (side == SplitKind::random_split) throw InputError("split_oov requires an oov side");
  if (top_frac <= 0.0 || top_frac >= 1.0) throw InputError("top_frac must be in (0, 1)");
  const std::size_t min_records = static_cast<std::size_t>(std::ceil(1.0 / top_frac));
  if (records.size() < min_records) {
    throw InputError("corpus too small: need at least " + std::to_string(min_records) +
                     " records for top_frac " + std::to_string(top_frac));
  }
  require_unique_ids(records);

  struct Scored {
    double conc;
    const PairedRecord* record;
  };
  std::vector<Scored> scored(records.size());
  parallel_chunks(records.size(), [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const PairedRecord& r = records[i];
      const std::string& text = (side == SplitKind::oov_sd) ? r.sd : r.rs;
      scored[i] = {oov_concentration(model, text, split_threshold), &r};
    }
  });
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.conc != b.conc) return a.conc > b.conc;
    return a.record->id < b.record->id;
  });

  // round-half-up of top_frac * N
  std::size_t test_size = static_cast<std::size_t>(
      std::floor(top_frac * static_cast<double>(records.size()) + 0.5));
  if (test_size == 0) test_size = 1;
  if (test_size > records.size()) test_size = records.size();

  SplitManifest manifest;
  manifest.kind = side;
  manifest.seed = 0;
  manifest.threshold = scored[test_size - 1].conc;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    (i < test_size ? manifest.test_ids : manifest.train_ids).push_back(scored[i].record->id);
  }
  return manifest;
}

SplitManifest split_random(std::span<const PairedRecord> records, std::size_t test_size,
                           std::uint64_t seed) {
  if (test_size > records.size()) {
    throw InputError("test_size " + std::to_string(test_size) + " exceeds corpus size " +
                     std::to_string(records.size()));
  }
  require_unique_ids(records);
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < test_size; ++i) {
    std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, order.size() - i));
    std::swap(order[i], order[j]);
  }
  std::vector<char> in_test(records.size(), 0);
  for (std::size_t i = 0; i < test_size; ++i) in_test[order[i]] = 1;

  SplitManifest manifest;
  manifest.kind = SplitKind::random_split;
  manifest.seed = seed;
  for (std::size_t i = 0; i < records.size(); ++i) {
    (in_test[i] ? manifest.test_ids : manifest.train_ids).push_back(records[i].id);
  }
  return manifest;
}

std::string manifest_to_json(const SplitManifest& manifest,
                             const std::map<std::string, std::string>& input_hashes) {
  nlohmann::ordered_json j;
  j["split"] = split_kind_name(manifest.kind);
  j["seed"] = manifest.seed;
  if (manifest.threshold) {
    j["threshold"] = *manifest.threshold;
  } else {
    j["threshold"] = nullptr;
  }
  j["test"] = manifest.test_ids;
  j["train"] = manifest.train_ids;
  nlohmann::ordered_json p;
  p["tool"] = kToolName;
  p["version"] = kToolVersion;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  for (const auto& [name, hash] : input_hashes) inputs[name] = hash;
  p["inputs"] = std::move(inputs);
  j["provenance"] = std::move(p);
  return j.dump() + "\n";
}

SplitManifest manifest_from_json(const std::string& bytes) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed manifest: ") + e.what());
  }
  SplitManifest manifest;
  try {
    manifest.kind = split_kind_from_name(j.at("split").get<std::string>());
    manifest.seed = j.value("seed", 0ull);
    if (j.contains("threshold") && !j["threshold"].is_null()) {
      manifest.threshold = j["threshold"].get<double>();
    }
    manifest.test_ids = j.at("test").get<std::vector<std::string>>();
    manifest.train_ids = j.at("train").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed manifest: ") + e.what());
  }
  return manifest;
}

SplitManifest load_manifest_file(const std::string& path) {
  return manifest_from_json(read_file_bytes(path));
}

void materialize_split(std::span<const PairedRecord> records, const SplitManifest& manifest,
                       const std::string& test_path, const std::string& train_path) {
  std::unordered_map<std::string, const PairedRecord*> by_id;
  for (const PairedRecord& r : records) by_id.emplace(r.id, &r);
  auto collect = [&](const std::vector<std::string>& ids) {
    std::vector<PairedRecord> out;
    out.reserve(ids.size());
    for (const std::string& id : ids) {
      auto it = by_id.find(id);
      if (it == by_id.end()) {
        throw InputError("manifest id not present in corpus: " + id);
      }
      out.push_back(*it->second);
    }
    return out;
  };
  write_paired_corpus(collect(manifest.test_ids), test_path);
  write_paired_corpus(collect(manifest.train_ids), train_path);
}

double test_overlap_fraction(const SplitManifest& a, const SplitManifest& b) {
  std::unordered_set<std::string> sa(a.test_ids.begin(), a.test_ids.end());
  std::size_t both = 0;
  for (const std::string& id : b.test_ids) {
    if (sa.count(id)) ++both;
  }
  std::size_t uni = sa.size() + b.test_ids.size() - both;
  if (uni == 0) return 0.0;
  return static_cast<double>(both) / static_cast<double>(uni);
}

}  // namespace vs
