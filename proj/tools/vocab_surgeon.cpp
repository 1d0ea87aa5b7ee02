// vocab-surgeon: batch pipeline for BPE vocabulary adaptation.
//
// Subcommands cover the whole flow: train a domain tokenizer, find
// replacement candidates in a base model, build the domain vocabulary,
// plan/apply the replacement-then-expansion surgery with subword-mean
// embedding initialization, and measure fragmentation / build evaluation
// splits on paired corpora. Every command is deterministic for a fixed
// config and seed. Exit codes: 0 success, 1 invariant or validation
// failure, 2 unusable input.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "CLI11.hpp"

#include <nlohmann/json.hpp>

#include "vs/candidates.hpp"
#include "vs/corpus.hpp"
#include "vs/domain_vocab.hpp"
#include "vs/embed_init.hpp"
#include "vs/embedding.hpp"
#include "vs/hash.hpp"
#include "vs/metrics.hpp"
#include "vs/splits.hpp"
#include "vs/surgery.hpp"
#include "vs/tokenizer_io.hpp"
#include "vs/version.hpp"

namespace {

namespace fs = std::filesystem;

std::vector<std::string> load_corpora(const std::vector<std::string>& paths) {
  std::vector<std::string> docs;
  for (const std::string& path : paths) {
    auto part = vs::read_text_corpus(path);
    docs.insert(docs.end(), part.begin(), part.end());
  }
  return docs;
}

std::map<std::string, std::string> hash_inputs(
    const std::vector<std::pair<std::string, std::string>>& named_paths) {
  std::map<std::string, std::string> hashes;
  for (const auto& [name, path] : named_paths) hashes[name] = vs::file_content_hash(path);
  return hashes;
}

std::vector<vs::TokenId> parse_id_list(const std::string& csv) {
  std::vector<vs::TokenId> ids;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t comma = csv.find(',', pos);
    if (comma == std::string::npos) comma = csv.size();
    std::string item = csv.substr(pos, comma - pos);
    if (!item.empty()) {
      ids.push_back(static_cast<vs::TokenId>(std::stoul(item)));
    }
    pos = comma + 1;
  }
  return ids;
}

struct TrainDomainOpts {
  std::vector<std::string> corpora;
  std::size_t vocab_size = 0;
  bool lowercase = false;
  std::string output;
};

int cmd_train_domain(const TrainDomainOpts& opt) {
  vs::PreTokenizerConfig cfg;
  cfg.lowercase = opt.lowercase;
  auto docs = load_corpora(opt.corpora);
  vs::TokenizerModel model = vs::train_bpe(docs, opt.vocab_size, cfg);
  vs::save_tokenizer_file(model, opt.output);
  std::printf("trained tokenizer: %zu tokens, %zu merges -> %s\n", model.vocab_size(),
              model.merges().size(), opt.output.c_str());
  return 0;
}

struct FindCandidatesOpts {
  std::string tokenizer;
  std::string embeddings;
  bool use_unembedding = false;
  std::optional<double> percentile;
  std::optional<double> absolute;
  std::string exclude_ids;
  std::string output;
};

int cmd_find_candidates(const FindCandidatesOpts& opt) {
  vs::TokenizerModel model = vs::load_tokenizer_file(opt.tokenizer);
  vs::EmbeddingMatrix matrix = vs::load_matrix_file(opt.embeddings);
  vs::CandidateConfig cfg;
  if (opt.percentile && opt.absolute) {
    throw vs::InputError("choose either --percentile or --absolute-threshold");
  }
  if (opt.absolute) {
    cfg.threshold.mode = vs::ThresholdConfig::Mode::absolute;
    cfg.threshold.value = *opt.absolute;
  } else if (opt.percentile) {
    cfg.threshold.mode = vs::ThresholdConfig::Mode::percentile;
    cfg.threshold.value = *opt.percentile;
  }
  cfg.use_unembedding_norms = opt.use_unembedding;
  cfg.user_excluded = parse_id_list(opt.exclude_ids);

  vs::CandidateReport report = vs::candidate_set(model, matrix, cfg);
  vs::save_candidate_report(report, model,
                            hash_inputs({{"tokenizer", opt.tokenizer},
                                         {"embeddings", opt.embeddings}}),
                            opt.output);
  std::printf("candidates: unreachable=%zu undertrained=%zu excluded=%zu final=%zu -> %s\n",
              report.unreachable.size(), report.undertrained.size(), report.excluded.size(),
              report.final_ids.size(), opt.output.c_str());
  return 0;
}

struct BuildDomainVocabOpts {
  std::string domain_tokenizer;
  std::string base_tokenizer;
  std::vector<std::string> corpora;
  std::size_t budget = 10000;
  bool no_refine = false;
  std::string output;
};

int cmd_build_domain_vocab(const BuildDomainVocabOpts& opt) {
  vs::TokenizerModel domain = vs::load_tokenizer_file(opt.domain_tokenizer);
  vs::TokenizerModel base = vs::load_tokenizer_file(opt.base_tokenizer);
  auto docs = load_corpora(opt.corpora);
  vs::DomainVocabulary vocab =
      vs::build_domain_vocab(domain, base, docs, opt.budget, !opt.no_refine);
  if (vocab.entries.size() < opt.budget) {
    std::fprintf(stderr, "warning: only %zu of %zu requested tokens survived filtering\n",
                 vocab.entries.size(), opt.budget);
  }
  vs::save_domain_vocab_file(vocab, opt.output);
  std::printf("domain vocabulary: %zu entries -> %s\n", vocab.entries.size(), opt.output.c_str());
  return 0;
}

struct AdaptOpts {
  std::string base_tokenizer;
  std::string embeddings;
  std::string unembeddings;
  std::string candidates;
  std::string domain_vocab;
  bool no_replace = false;
  std::string output_dir;
};

int cmd_adapt(const AdaptOpts& opt) {
  vs::TokenizerModel base = vs::load_tokenizer_file(opt.base_tokenizer);
  vs::CandidateReportFile candidates = vs::load_candidate_report(opt.candidates);
  const std::string base_hash = vs::model_content_hash(base);
  if (candidates.base_tokenizer_hash != base_hash) {
    throw vs::InputError("candidate report was computed against a different tokenizer (hash " +
                         candidates.base_tokenizer_hash + ", expected " + base_hash + ")");
  }
  vs::DomainVocabulary domain = vs::load_domain_vocab_file(opt.domain_vocab);
  vs::EmbeddingMatrix embedding = vs::load_matrix_file(opt.embeddings);
  vs::EmbeddingMatrix unembedding = vs::load_matrix_file(opt.unembeddings);

  if (opt.no_replace) {
    candidates.report.final_ids.clear();  // ablation: pure expansion
  }
  vs::SurgeryPlan plan = vs::plan_surgery(base, candidates.report, domain);
  vs::TokenizerModel adapted = vs::apply_surgery(base, plan);
  vs::InitResult init = vs::init_new_rows(base, plan, embedding, unembedding);
  vs::SurgeryReport report = vs::make_surgery_report(plan, embedding.cols);

  fs::create_directories(opt.output_dir);
  auto out = [&](const char* name) { return (fs::path(opt.output_dir) / name).string(); };
  auto hashes = hash_inputs({{"base_tokenizer", opt.base_tokenizer},
                             {"embeddings", opt.embeddings},
                             {"unembeddings", opt.unembeddings},
                             {"candidates", opt.candidates},
                             {"domain_vocab", opt.domain_vocab}});
  vs::save_tokenizer_file(adapted, out("tokenizer.json"));
  vs::save_matrix_file(init.embedding, out("embeddings.vsemb"));
  vs::save_matrix_file(init.unembedding, out("unembeddings.vsemb"));
  vs::save_surgery_plan(plan, hashes, out("surgery_plan.json"));
  vs::save_surgery_report(report, hashes, out("surgery_report.json"));
  vs::save_init_report(init.report, hashes, out("init_report.json"));

  std::printf("vocab: %zu -> %zu (replaced %zu, expanded %zu, total new %zu)\n",
              report.base_vocab_size, report.final_vocab_size, report.replaced_count,
              report.expanded_count, report.total_new_tokens);
  std::printf("parameter delta: %llu (%.2f%% saved vs no-replace baseline %llu)\n",
              static_cast<unsigned long long>(report.parameter_delta), report.percent_saved,
              static_cast<unsigned long long>(report.no_replace_parameter_delta));
  if (!report.replaced_reachable.empty()) {
    std::printf("note: %zu replaced tokens were reachable; texts containing them re-encode "
                "differently (see surgery_report.json)\n",
                report.replaced_reachable.size());
  }
  return 0;
}

struct InitEmbeddingsOpts {
  std::string base_tokenizer;
  std::string plan;
  std::string embeddings;
  std::string unembeddings;
  std::string output_dir;
};

int cmd_init_embeddings(const InitEmbeddingsOpts& opt) {
  vs::TokenizerModel base = vs::load_tokenizer_file(opt.base_tokenizer);
  vs::SurgeryPlan plan = vs::load_surgery_plan(opt.plan);
  vs::EmbeddingMatrix embedding = vs::load_matrix_file(opt.embeddings);
  vs::EmbeddingMatrix unembedding = vs::load_matrix_file(opt.unembeddings);
  vs::InitResult init = vs::init_new_rows(base, plan, embedding, unembedding);

  fs::create_directories(opt.output_dir);
  auto out = [&](const char* name) { return (fs::path(opt.output_dir) / name).string(); };
  auto hashes = hash_inputs({{"base_tokenizer", opt.base_tokenizer},
                             {"plan", opt.plan},
                             {"embeddings", opt.embeddings},
                             {"unembeddings", opt.unembeddings}});
  vs::save_matrix_file(init.embedding, out("embeddings.vsemb"));
  vs::save_matrix_file(init.unembedding, out("unembeddings.vsemb"));
  vs::save_init_report(init.report, hashes, out("init_report.json"));
  std::printf("initialized %zu replaced and %zu appended rows\n", init.report.replaced_rows,
              init.report.appended_rows);
  return 0;
}

struct MetricsOpts {
  std::string tokenizer;
  std::string corpus;
  std::size_t split_threshold = 2;
  std::string manifest;
  std::string subset = "test";
  std::string output;
  std::string csv;
};

int cmd_metrics(const MetricsOpts& opt) {
  vs::TokenizerModel model = vs::load_tokenizer_file(opt.tokenizer);
  vs::PairedCorpus corpus = vs::read_paired_corpus(opt.corpus);
  for (const vs::CorpusError& e : corpus.errors) {
    std::fprintf(stderr, "warning: line %zu: %s\n", e.line, e.message.c_str());
  }
  std::vector<vs::PairedRecord> records = std::move(corpus.records);
  if (!opt.manifest.empty()) {
    vs::SplitManifest manifest = vs::load_manifest_file(opt.manifest);
    const auto& ids = (opt.subset == "train") ? manifest.train_ids : manifest.test_ids;
    std::unordered_set<std::string> keep(ids.begin(), ids.end());
    std::erase_if(records, [&](const vs::PairedRecord& r) { return !keep.count(r.id); });
  }
  vs::CorpusReport report = vs::corpus_report(model, records, opt.split_threshold);
  vs::save_corpus_report(report, corpus.errors,
                         hash_inputs({{"tokenizer", opt.tokenizer}, {"corpus", opt.corpus}}),
                         opt.output);
  if (!opt.csv.empty()) {
    vs::write_file_bytes(opt.csv, vs::corpus_report_csv(report));
  }
  std::printf("%zu documents: fragment sd/rs %.4f/%.4f, oov sd/rs %.4f/%.4f -> %s\n",
              report.documents, report.mean.fragment_sd, report.mean.fragment_rs,
              report.mean.sd_oov_conc, report.mean.rs_oov_conc, opt.output.c_str());
  return 0;
}

struct SplitOpts {
  std::string corpus;
  std::string tokenizer;
  std::string kind = "oov_sd";
  std::string side;
  double top_frac = 0.10;
  std::size_t test_size = 0;
  std::uint64_t seed = 0;
  std::size_t split_threshold = 2;
  std::string output;
  std::string materialize;
  std::string output_dir;
};

int cmd_split(const SplitOpts& opt) {
  vs::PairedCorpus corpus = vs::read_paired_corpus(opt.corpus);
  for (const vs::CorpusError& e : corpus.errors) {
    std::fprintf(stderr, "warning: line %zu: %s\n", e.line, e.message.c_str());
  }
  if (!opt.materialize.empty()) {
    vs::SplitManifest manifest = vs::load_manifest_file(opt.materialize);
    fs::create_directories(opt.output_dir);
    auto test_path = (fs::path(opt.output_dir) / "test.jsonl").string();
    auto train_path = (fs::path(opt.output_dir) / "train.jsonl").string();
    vs::materialize_split(corpus.records, manifest, test_path, train_path);
    std::printf("materialized %zu test and %zu train records into %s\n",
                manifest.test_ids.size(), manifest.train_ids.size(), opt.output_dir.c_str());
    return 0;
  }

  std::string kind_name = opt.kind;
  if (!opt.side.empty()) kind_name = "oov_" + opt.side;
  vs::SplitKind kind = vs::split_kind_from_name(kind_name);
  vs::SplitManifest manifest;
  std::map<std::string, std::string> hashes;
  if (kind == vs::SplitKind::random_split) {
    std::size_t test_size = opt.test_size;
    if (test_size == 0) {
      test_size = static_cast<std::size_t>(
          std::floor(opt.top_frac * static_cast<double>(corpus.records.size()) + 0.5));
    }
    manifest = vs::split_random(corpus.records, test_size, opt.seed);
    hashes = hash_inputs({{"corpus", opt.corpus}});
  } else {
    if (opt.tokenizer.empty()) {
      throw vs::InputError("--tokenizer is required for oov splits (scoring side)");
    }
    vs::TokenizerModel model = vs::load_tokenizer_file(opt.tokenizer);
    manifest = vs::split_oov(corpus.records, model, kind, opt.top_frac, opt.split_threshold);
    hashes = hash_inputs({{"corpus", opt.corpus}, {"tokenizer", opt.tokenizer}});
  }
  vs::write_file_bytes(opt.output, vs::manifest_to_json(manifest, hashes));
  if (manifest.threshold) {
    std::printf("split %s: %zu test / %zu train, threshold %.6f -> %s\n", kind_name.c_str(),
                manifest.test_ids.size(), manifest.train_ids.size(), *manifest.threshold,
                opt.output.c_str());
  } else {
    std::printf("split %s: %zu test / %zu train (seed %llu) -> %s\n", kind_name.c_str(),
                manifest.test_ids.size(), manifest.train_ids.size(),
                static_cast<unsigned long long>(manifest.seed), opt.output.c_str());
  }
  return 0;
}

struct ReportOpts {
  std::vector<std::string> inputs;
};

void summarize_artifact(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(vs::read_file_bytes(path));
  } catch (const nlohmann::json::exception& e) {
    throw vs::InputError(path + ": not a JSON artifact: " + e.what());
  }
  std::printf("== %s\n", path.c_str());
  if (j.contains("provenance")) {
    const auto& p = j["provenance"];
    std::printf("  produced by %s %s\n", p.value("tool", "?").c_str(),
                p.value("version", "?").c_str());
    if (p.contains("inputs")) {
      for (auto it = p["inputs"].begin(); it != p["inputs"].end(); ++it) {
        std::printf("  input %s = %s\n", it.key().c_str(),
                    it.value().get<std::string>().c_str());
      }
    }
  }
  if (j.contains("counts")) {  // candidate report
    const auto& c = j["counts"];
    std::printf("  candidates: unreachable=%llu undertrained=%llu union=%llu excluded=%llu "
                "final=%llu\n",
                c["unreachable"].get<unsigned long long>(),
                c["undertrained"].get<unsigned long long>(),
                c["union"].get<unsigned long long>(), c["excluded"].get<unsigned long long>(),
                c["final"].get<unsigned long long>());
  } else if (j.contains("final_vocab_size")) {  // surgery report
    std::printf("  vocab %llu -> %llu, replaced %llu, expanded %llu, delta %llu (%.2f%% saved)\n",
                j["base_vocab_size"].get<unsigned long long>(),
                j["final_vocab_size"].get<unsigned long long>(),
                j["replaced_count"].get<unsigned long long>(),
                j["expanded_count"].get<unsigned long long>(),
                j["parameter_delta"].get<unsigned long long>(), j.value("percent_saved", 0.0));
  } else if (j.contains("replaced_rows")) {  // init report
    std::printf("  initialized rows: %llu replaced, %llu appended\n",
                j["replaced_rows"].get<unsigned long long>(),
                j["appended_rows"].get<unsigned long long>());
  } else if (j.contains("mean")) {  // metrics report
    const auto& m = j["mean"];
    std::printf("  %llu documents, mean fragment sd/rs %.4f/%.4f, mean oov sd/rs %.4f/%.4f\n",
                j.value("documents", 0ull), m.value("fragment_sd", 0.0),
                m.value("fragment_rs", 0.0), m.value("sd_oov_conc", 0.0),
                m.value("rs_oov_conc", 0.0));
  } else if (j.contains("split")) {  // manifest
    std::printf("  split %s: %zu test / %zu train\n", j["split"].get<std::string>().c_str(),
                j["test"].size(), j["train"].size());
  }
}

int cmd_report(const ReportOpts& opt) {
  std::vector<vs::SplitManifest> manifests;
  std::vector<std::string> manifest_names;
  for (const std::string& path : opt.inputs) {
    summarize_artifact(path);
    nlohmann::json j = nlohmann::json::parse(vs::read_file_bytes(path), nullptr, false);
    if (j.is_object() && j.contains("split")) {
      manifests.push_back(vs::load_manifest_file(path));
      manifest_names.push_back(path);
    }
  }
  for (std::size_t i = 0; i < manifests.size(); ++i) {
    for (std::size_t k = i + 1; k < manifests.size(); ++k) {
      std::printf("test-set overlap %s vs %s: %.2f%%\n", manifest_names[i].c_str(),
                  manifest_names[k].c_str(),
                  100.0 * vs::test_overlap_fraction(manifests[i], manifests[k]));
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BPE tokenizer vocabulary adaptation toolkit"};
  app.set_version_flag("--version", std::string(vs::kToolName) + " " + vs::kToolVersion);
  app.set_config("--config", "", "Read options from a TOML-style config file");
  app.require_subcommand(1);

  TrainDomainOpts train_opt;
  auto* train = app.add_subcommand("train-domain", "Train a BPE tokenizer on a domain corpus");
  train->add_option("--corpus", train_opt.corpora, "Text corpus, one document per line")
      ->required();
  train->add_option("--vocab-size", train_opt.vocab_size, "Target vocabulary size (> 256)")
      ->required();
  train->add_flag("--lowercase", train_opt.lowercase, "Fold ASCII case before tokenization");
  train->add_option("--output", train_opt.output, "Output tokenizer file")->required();

  FindCandidatesOpts cand_opt;
  auto* cand = app.add_subcommand("find-candidates",
                                  "Find unreachable and undertrained replacement candidates");
  cand->add_option("--tokenizer", cand_opt.tokenizer, "Base tokenizer file")->required();
  cand->add_option("--embeddings", cand_opt.embeddings, "Embedding matrix file")->required();
  cand->add_flag("--use-unembedding-norms", cand_opt.use_unembedding,
                 "Norm source is the unembedding matrix");
  cand->add_option("--percentile", cand_opt.percentile,
                   "Undertrained threshold as a percentile of eligible norms (default 2.0)");
  cand->add_option("--absolute-threshold", cand_opt.absolute,
                   "Undertrained threshold as an absolute norm value");
  cand->add_option("--exclude-ids", cand_opt.exclude_ids,
                   "Comma-separated token ids shielded from candidacy");
  cand->add_option("--output", cand_opt.output, "Output report JSON")->required();

  BuildDomainVocabOpts vocab_opt;
  auto* vocab = app.add_subcommand("build-domain-vocab",
                                   "Select top domain tokens absent from the base vocabulary");
  vocab->add_option("--domain-tokenizer", vocab_opt.domain_tokenizer, "Domain tokenizer file")
      ->required();
  vocab->add_option("--base-tokenizer", vocab_opt.base_tokenizer, "Base tokenizer file")
      ->required();
  vocab->add_option("--corpus", vocab_opt.corpora, "Domain corpus, one document per line")
      ->required();
  vocab->add_option("--budget", vocab_opt.budget, "Number of tokens to select (default 10000)");
  vocab->add_flag("--no-refine", vocab_opt.no_refine, "Skip the alphabetic filter (ablation)");
  vocab->add_option("--output", vocab_opt.output, "Output JSONL vocabulary")->required();

  AdaptOpts adapt_opt;
  auto* adapt = app.add_subcommand(
      "adapt", "Replace candidates with domain tokens, expand the rest, initialize embeddings");
  adapt->add_option("--base-tokenizer", adapt_opt.base_tokenizer, "Base tokenizer file")
      ->required();
  adapt->add_option("--embeddings", adapt_opt.embeddings, "Embedding matrix file")->required();
  adapt->add_option("--unembeddings", adapt_opt.unembeddings, "Unembedding matrix file")
      ->required();
  adapt->add_option("--candidates", adapt_opt.candidates, "Candidate report JSON")->required();
  adapt->add_option("--domain-vocab", adapt_opt.domain_vocab, "Domain vocabulary JSONL")
      ->required();
  adapt->add_flag("--no-replace", adapt_opt.no_replace, "Expansion-only ablation");
  adapt->add_option("--output-dir", adapt_opt.output_dir, "Directory for output artifacts")
      ->required();

  InitEmbeddingsOpts init_opt;
  auto* init = app.add_subcommand("init-embeddings",
                                  "Subword-mean initialization from an existing surgery plan");
  init->add_option("--base-tokenizer", init_opt.base_tokenizer, "Base tokenizer file")
      ->required();
  init->add_option("--plan", init_opt.plan, "Surgery plan JSON")->required();
  init->add_option("--embeddings", init_opt.embeddings, "Embedding matrix file")->required();
  init->add_option("--unembeddings", init_opt.unembeddings, "Unembedding matrix file")
      ->required();
  init->add_option("--output-dir", init_opt.output_dir, "Directory for output matrices")
      ->required();

  MetricsOpts metrics_opt;
  auto* metrics = app.add_subcommand("metrics",
                                     "Fragment scores and OOV statistics over a paired corpus");
  metrics->add_option("--tokenizer", metrics_opt.tokenizer, "Tokenizer file")->required();
  metrics->add_option("--corpus", metrics_opt.corpus, "Paired JSONL corpus")->required();
  metrics->add_option("--split-threshold", metrics_opt.split_threshold,
                      "Encode length that counts as fragmented (default 2)");
  metrics->add_option("--manifest", metrics_opt.manifest, "Restrict to a split manifest");
  metrics->add_option("--subset", metrics_opt.subset, "Manifest subset: test or train")
      ->check(CLI::IsMember({"test", "train"}));
  metrics->add_option("--output", metrics_opt.output, "Output report JSON")->required();
  metrics->add_option("--csv", metrics_opt.csv, "Also write aggregate CSV");

  SplitOpts split_opt;
  auto* split = app.add_subcommand("split", "Build challenge or random evaluation splits");
  split->add_option("--corpus", split_opt.corpus, "Paired JSONL corpus")->required();
  split->add_option("--tokenizer", split_opt.tokenizer, "Tokenizer for OOV scoring");
  split->add_option("--kind", split_opt.kind, "oov_sd, oov_rs, or random")
      ->check(CLI::IsMember({"oov_sd", "oov_rs", "random"}));
  split->add_option("--side", split_opt.side, "Shorthand: sd or rs selects the oov split side")
      ->check(CLI::IsMember({"sd", "rs"}));
  split->add_option("--top-frac", split_opt.top_frac, "Test fraction (default 0.10)");
  split->add_option("--test-size", split_opt.test_size,
                    "Random-split test size (default: top-frac of corpus)");
  split->add_option("--seed", split_opt.seed, "Random-split seed");
  split->add_option("--split-threshold", split_opt.split_threshold,
                    "Encode length that counts as fragmented (default 2)");
  split->add_option("--output", split_opt.output, "Output manifest JSON");
  split->add_option("--materialize", split_opt.materialize,
                    "Write test/train JSONL from this manifest instead of splitting");
  split->add_option("--output-dir", split_opt.output_dir, "Directory for materialized files");

  ReportOpts report_opt;
  auto* report = app.add_subcommand("report", "Summarize artifacts; overlap for manifest pairs");
  report->add_option("--input", report_opt.inputs, "Artifact JSON files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (train->parsed()) return cmd_train_domain(train_opt);
    if (cand->parsed()) return cmd_find_candidates(cand_opt);
    if (vocab->parsed()) return cmd_build_domain_vocab(vocab_opt);
    if (adapt->parsed()) return cmd_adapt(adapt_opt);
    if (init->parsed()) return cmd_init_embeddings(init_opt);
    if (metrics->parsed()) return cmd_metrics(metrics_opt);
    if (split->parsed()) {
      if (split_opt.materialize.empty() && split_opt.output.empty()) {
        throw vs::InputError("split needs --output (manifest) or --materialize + --output-dir");
      }
      if (!split_opt.materialize.empty() && split_opt.output_dir.empty()) {
        throw vs::InputError("--materialize requires --output-dir");
      }
      return cmd_split(split_opt);
    }
    if (report->parsed()) return cmd_report(report_opt);
  } catch (const vs::InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const vs::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
