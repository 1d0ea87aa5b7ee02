#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vs/corpus.hpp"
#include "vs/tokenizer.hpp"

namespace vs {

enum class SplitKind { random_split, oov_sd, oov_rs };

const char* split_kind_name(SplitKind kind);
SplitKind split_kind_from_name(const std::string& name);

struct SplitManifest {
  SplitKind kind = SplitKind::random_split;
  std::uint64_t seed = 0;
  // OOV concentration at the decile cut; absent for random splits.
  std::optional<double> threshold;
  std::vector<std::string> test_ids;
  std::vector<std::string> train_ids;
};

// Challenge split: score every document's OOV concentration on the chosen
// side (oov_sd or oov_rs), sort descending with ties broken by ascending
// document id, and take the top round-half-up(top_frac * N) as test.
SplitManifest split_oov(std::span<const PairedRecord> records, const TokenizerModel& model,
                        SplitKind side, double top_frac = 0.10,
                        std::size_t split_threshold = 2);

// Uniform sample without replacement: partial Fisher-Yates over the records
// in input order, driven by std::mt19937_64(seed) with rejection-sampled
// bounded draws, so manifests are identical across platforms.
SplitManifest split_random(std::span<const PairedRecord> records, std::size_t test_size,
                           std::uint64_t seed);

std::string manifest_to_json(const SplitManifest& manifest,
                             const std::map<std::string, std::string>& input_hashes);
SplitManifest manifest_from_json(const std::string& bytes);
SplitManifest load_manifest_file(const std::string& path);

// Writes test/train JSONL corpora selected by the manifest.
void materialize_split(std::span<const PairedRecord> records, const SplitManifest& manifest,
                       const std::string& test_path, const std::string& train_path);

// |A ∩ B| / |A ∪ B| over test-id sets.
double test_overlap_fraction(const SplitManifest& a, const SplitManifest& b);

}  // namespace vs
