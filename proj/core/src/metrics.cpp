#include "vs/metrics.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "vs/hash.hpp"
#include "vs/parallel.hpp"
#include "vs/pretokenize.hpp"
#include "vs/version.hpp"

namespace vs {

namespace {

// Encode-length lookup with memoization; corpora repeat words heavily.
class WordLengthCache {
 public:
  explicit WordLengthCache(const TokenizerModel& model) : model_(model) {}

  std::size_t encoded_length(const std::string& word) {
    auto [it, fresh] = cache_.try_emplace(word, 0);
    if (fresh) it->second = model_.encode(it->first).size();
    return it->second;
  }

 private:
  const TokenizerModel& model_;
  std::unordered_map<std::string, std::size_t> cache_;
};

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return (values[mid - 1] + values[mid]) / 2.0;
}

DocumentStats stats_with_cache(const TokenizerModel& model, const PairedRecord& record,
                               std::size_t split_threshold, WordLengthCache& cache) {
  DocumentStats stats;
  stats.sd_token_count = model.encode(record.sd).size();
  stats.rs_token_count = model.encode(record.rs).size();

  auto side = [&](std::string_view text, double& oov, double& fragment) {
    std::vector<std::string> unigrams = extract_unigrams(text);
    if (unigrams.empty()) {
      oov = 0.0;
      fragment = 1.0;
      return;
    }
    std::uint64_t tokens = 0;
    std::uint64_t split = 0;
    for (const std::string& word : unigrams) {
      std::size_t len = cache.encoded_length(word);
      tokens += len;
      if (len >= split_threshold) ++split;
    }
    oov = static_cast<double>(split) / static_cast<double>(unigrams.size());
    fragment = static_cast<double>(tokens) / static_cast<double>(unigrams.size());
  };
  side(record.sd, stats.sd_oov_conc, stats.fragment_sd);
  side(record.rs, stats.rs_oov_conc, stats.fragment_rs);
  stats.novel_unigram_conc = novel_unigram_concentration(record.sd, record.rs);
  return stats;
}

}  // namespace

std::vector<std::string> extract_unigrams(std::string_view text) {
  std::vector<std::string> unigrams;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    while (i < n && is_ascii_space(text[i])) ++i;
    std::size_t j = i;
    while (j < n && !is_ascii_space(text[j])) ++j;
    if (j > i) {
      std::size_t a = i;
      std::size_t b = j;
      while (a < b && is_ascii_punct(text[a])) ++a;
      while (b > a && is_ascii_punct(text[b - 1])) --b;
      if (b > a) unigrams.emplace_back(text.substr(a, b - a));
    }
    i = j;
  }
  return unigrams;
}

double fragment_score(const TokenizerModel& model, std::string_view text) {
  std::vector<std::string> unigrams = extract_unigrams(text);
  if (unigrams.empty()) return 1.0;
  WordLengthCache cache(model);
  std::uint64_t tokens = 0;
  for (const std::string& word : unigrams) tokens += cache.encoded_length(word);
  return static_cast<double>(tokens) / static_cast<double>(unigrams.size());
}

double oov_concentration(const TokenizerModel& model, std::string_view text,
                         std::size_t split_threshold) {
  if (split_threshold < 2) throw InputError("split_threshold must be >= 2");
  std::vector<std::string> unigrams = extract_unigrams(text);
  if (unigrams.empty()) return 0.0;
  WordLengthCache cache(model);
  std::uint64_t split = 0;
  for (const std::string& word : unigrams) {
    if (cache.encoded_length(word) >= split_threshold) ++split;
  }
  return static_cast<double>(split) / static_cast<double>(unigrams.size());
}

double novel_unigram_concentration(std::string_view source, std::string_view summary) {
  std::unordered_set<std::string> summary_set;
  for (const std::string& w : extract_unigrams(summary)) summary_set.insert(lowercase_ascii(w));
  if (summary_set.empty()) return 0.0;
  std::unordered_set<std::string> source_set;
  for (const std::string& w : extract_unigrams(source)) source_set.insert(lowercase_ascii(w));
  std::size_t novel = 0;
  for (const std::string& w : summary_set) {
    if (!source_set.count(w)) ++novel;
  }
  return static_cast<double>(novel) / static_cast<double>(summary_set.size());
}

DocumentStats document_stats(const TokenizerModel& model, const PairedRecord& record,
                             std::size_t split_threshold) {
  if (split_threshold < 2) throw InputError("split_threshold must be >= 2");
  WordLengthCache cache(model);
  return stats_with_cache(model, record, split_threshold, cache);
}

CorpusReport corpus_report(const TokenizerModel& model, std::span<const PairedRecord> records,
                           std::size_t split_threshold) {
  if (split_threshold < 2) throw InputError("split_threshold must be >= 2");
  CorpusReport report;
  report.documents = records.size();
  report.split_threshold = split_threshold;
  report.per_document.resize(records.size());
  parallel_chunks(records.size(), [&](std::size_t, std::size_t begin, std::size_t end) {
    WordLengthCache cache(model);
    for (std::size_t i = begin; i < end; ++i) {
      report.per_document[i] = stats_with_cache(model, records[i], split_threshold, cache);
    }
  });

  if (records.empty()) return report;
  auto aggregate = [&](auto field_of) {
    std::vector<double> values;
    values.reserve(records.size());
    for (const DocumentStats& s : report.per_document) values.push_back(field_of(s));
    double sum = 0.0;
    for (double v : values) sum += v;
    double mean = sum / static_cast<double>(values.size());
    return std::pair<double, double>(mean, median_of(std::move(values)));
  };
  std::tie(report.mean.sd_token_count, report.median.sd_token_count) =
      aggregate([](const DocumentStats& s) { return static_cast<double>(s.sd_token_count); });
  std::tie(report.mean.rs_token_count, report.median.rs_token_count) =
      aggregate([](const DocumentStats& s) { return static_cast<double>(s.rs_token_count); });
  std::tie(report.mean.sd_oov_conc, report.median.sd_oov_conc) =
      aggregate([](const DocumentStats& s) { return s.sd_oov_conc; });
  std::tie(report.mean.rs_oov_conc, report.median.rs_oov_conc) =
      aggregate([](const DocumentStats& s) { return s.rs_oov_conc; });
  std::tie(report.mean.fragment_sd, report.median.fragment_sd) =
      aggregate([](const DocumentStats& s) { return s.fragment_sd; });
  std::tie(report.mean.fragment_rs, report.median.fragment_rs) =
      aggregate([](const DocumentStats& s) { return s.fragment_rs; });
  std::tie(report.mean.novel_unigram_conc, report.median.novel_unigram_conc) =
      aggregate([](const DocumentStats& s) { return s.novel_unigram_conc; });
  return report;
}

namespace {

nlohmann::ordered_json aggregate_json(const AggregateStats& a) {
  nlohmann::ordered_json j;
  j["sd_token_count"] = a.sd_token_count;
  j["rs_token_count"] = a.rs_token_count;
  j["sd_oov_conc"] = a.sd_oov_conc;
  j["rs_oov_conc"] = a.rs_oov_conc;
  j["fragment_sd"] = a.fragment_sd;
  j["fragment_rs"] = a.fragment_rs;
  j["novel_unigram_conc"] = a.novel_unigram_conc;
  return j;
}

}  // namespace

void save_corpus_report(const CorpusReport& report, std::span<const CorpusError> errors,
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
  j["documents"] = report.documents;
  j["split_threshold"] = report.split_threshold;
  j["mean"] = aggregate_json(report.mean);
  j["median"] = aggregate_json(report.median);
  nlohmann::ordered_json errs = nlohmann::ordered_json::array();
  for (const CorpusError& e : errors) {
    nlohmann::ordered_json x;
    x["line"] = e.line;
    x["message"] = e.message;
    errs.push_back(std::move(x));
  }
  j["errors"] = std::move(errs);
  write_file_bytes(path, j.dump(2) + "\n");
}

std::string corpus_report_csv(const CorpusReport& report) {
  auto row = [](const char* name, const AggregateStats& a) {
    std::string line = name;
    for (double v : {a.sd_token_count, a.rs_token_count, a.sd_oov_conc, a.rs_oov_conc,
                     a.fragment_sd, a.fragment_rs, a.novel_unigram_conc}) {
      line += "," + std::to_string(v);
    }
    return line + "\n";
  };
  std::string csv =
      "aggregate,sd_token_count,rs_token_count,sd_oov_conc,rs_oov_conc,fragment_sd,fragment_rs,"
      "novel_unigram_conc\n";
  csv += row("mean", report.mean);
  csv += row("median", report.median);
  return csv;
}

}  // namespace vs
