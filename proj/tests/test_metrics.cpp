#include <cmath>
#include <set>

#include "doctest.h"
#include "support/test_util.hpp"
#include "vs/corpus.hpp"
#include "vs/metrics.hpp"

using vs::TokenizerModel;

namespace {

std::vector<std::string> byte_vocab() {
  std::vector<std::string> vocab(vs::kByteTokenCount);
  for (std::size_t b = 0; b < vs::kByteTokenCount; ++b) vocab[b] = std::string(1, static_cast<char>(b));
  return vocab;
}

TokenizerModel osteo_base() {
  auto vocab = byte_vocab();
  for (const char* t : {"st", "ste", "op", "opo", "opor", "os", "osi", "osis"}) vocab.push_back(t);
  return TokenizerModel::build(std::move(vocab),
                               {{"s", "t"},
                                {"st", "e"},
                                {"o", "p"},
                                {"op", "o"},
                                {"opo", "r"},
                                {"o", "s"},
                                {"os", "i"},
                                {"osi", "s"}});
}

// Oracle pieces: an independent unigram splitter and brute-force scoring.
std::vector<std::string> oracle_unigrams(std::string_view text) {
  auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  };
  auto is_punct = [](char c) {
    static const std::string punct = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";
    return punct.find(c) != std::string::npos;
  };
  std::vector<std::string> words;
  std::string cur;
  std::string padded(text);
  padded.push_back(' ');
  for (char c : padded) {
    if (is_space(c)) {
      while (!cur.empty() && is_punct(cur.front())) cur.erase(cur.begin());
      while (!cur.empty() && is_punct(cur.back())) cur.pop_back();
      if (!cur.empty()) words.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  return words;
}

}  // namespace

TEST_SUITE_BEGIN("metrics");

TEST_CASE("unigram extraction strips edge punctuation") {
  CHECK(vs::extract_unigrams("Hello, world!") == std::vector<std::string>{"Hello", "world"});
  CHECK(vs::extract_unigrams("(a) --- b.") == std::vector<std::string>{"a", "b"});
  CHECK(vs::extract_unigrams("co-morbid state") ==
        std::vector<std::string>{"co-morbid", "state"});
  CHECK(vs::extract_unigrams("  \t\n ").empty());
  CHECK(vs::extract_unigrams("").empty());
}

TEST_CASE("fragment score floor and the four-way split example") {
  TokenizerModel m = osteo_base();
  CHECK(vs::fragment_score(m, "") == 1.0);
  // every "word" here is a single token (single letters are byte tokens)
  CHECK(vs::fragment_score(m, "o s t") == 1.0);
  // capital O stays a byte; the rest folds into ste/opor/osis
  CHECK(vs::fragment_score(m, "Osteoporosis") == 4.0);
}

TEST_CASE("oov concentration counts fragmented unigrams") {
  TokenizerModel m = osteo_base();
  CHECK(vs::oov_concentration(m, "o s t") == 0.0);
  // 10 words, 3 fragmented
  std::string text = "o o o o o o o xy xy xy";
  CHECK(vs::oov_concentration(m, text) == doctest::Approx(0.3));
  // higher threshold: a 2-piece word no longer counts
  CHECK(vs::oov_concentration(m, text, 3) == 0.0);
  CHECK_THROWS_AS(vs::oov_concentration(m, text, 1), vs::InputError);
}

TEST_CASE("novel unigram concentration") {
  CHECK(vs::novel_unigram_concentration("alpha beta gamma", "alpha beta") == 0.0);
  CHECK(vs::novel_unigram_concentration("alpha beta gamma", "alpha beta gamma delta") ==
        doctest::Approx(0.25));
  CHECK(vs::novel_unigram_concentration("anything", "") == 0.0);
  // case-folded matching
  CHECK(vs::novel_unigram_concentration("Alpha", "alpha ALPHA") == 0.0);
  // set semantics: duplicates do not change the value
  CHECK(vs::novel_unigram_concentration("a b", "c c c a") ==
        vs::novel_unigram_concentration("a b", "c a"));
}

TEST_CASE("metrics agree with brute-force recomputation on random documents") {
  vstest::Rng rng(401);
  TokenizerModel m = vs::train_bpe(vstest::general_fixture_corpus(250, 61), 420);
  for (int i = 0; i < 120; ++i) {
    std::string doc;
    int words = 1 + static_cast<int>(rng.below(20));
    for (int w = 0; w < words; ++w) {
      if (w) doc += ' ';
      switch (rng.below(4)) {
        case 0:
          doc += rng.pick(vstest::common_words());
          break;
        case 1:
          doc += "(" + rng.pick(vstest::common_words()) + ")!";
          break;
        case 2:
          doc += rng.pick(vstest::domain_terms());
          break;
        default:
          doc += vstest::random_word(rng, "abcdxyz", 1, 9);
          break;
      }
    }
    auto words_oracle = oracle_unigrams(doc);
    CHECK(vs::extract_unigrams(doc) == words_oracle);

    std::uint64_t tokens = 0, split = 0;
    for (const std::string& w : words_oracle) {
      std::size_t len = vstest::reference_encode(m, w).size();
      tokens += len;
      if (len >= 2) ++split;
    }
    double expected_fragment =
        words_oracle.empty() ? 1.0
                             : static_cast<double>(tokens) /
                                   static_cast<double>(words_oracle.size());
    double expected_oov =
        words_oracle.empty() ? 0.0
                             : static_cast<double>(split) /
                                   static_cast<double>(words_oracle.size());
    CHECK(vs::fragment_score(m, doc) == expected_fragment);
    CHECK(vs::oov_concentration(m, doc) == expected_oov);
  }
}

TEST_CASE("novelty matches set-difference arithmetic on random word lists") {
  vstest::Rng rng(403);
  for (int i = 0; i < 60; ++i) {
    auto make_text = [&](int n) {
      std::string text;
      for (int w = 0; w < n; ++w) {
        if (w) text += ' ';
        text += vstest::random_word(rng, "abcd", 1, 3);
      }
      return text;
    };
    std::string source = make_text(1 + static_cast<int>(rng.below(12)));
    std::string summary = make_text(1 + static_cast<int>(rng.below(12)));
    std::set<std::string> src, sum;
    for (const auto& w : oracle_unigrams(source)) src.insert(vs::lowercase_ascii(w));
    for (const auto& w : oracle_unigrams(summary)) sum.insert(vs::lowercase_ascii(w));
    std::size_t novel = 0;
    for (const auto& w : sum) novel += src.count(w) ? 0 : 1;
    double expected =
        sum.empty() ? 0.0 : static_cast<double>(novel) / static_cast<double>(sum.size());
    CHECK(vs::novel_unigram_concentration(source, summary) == expected);
  }
}

TEST_CASE("one-document corpus aggregates to that document's stats") {
  TokenizerModel m = osteo_base();
  vs::PairedRecord rec{"d1", "o s Osteoporosis", "o Osteoporosis"};
  vs::DocumentStats stats = vs::document_stats(m, rec);
  std::vector<vs::PairedRecord> records = {rec};
  vs::CorpusReport report = vs::corpus_report(m, records);
  CHECK(report.documents == 1);
  CHECK(report.mean.sd_token_count == static_cast<double>(stats.sd_token_count));
  CHECK(report.mean.fragment_sd == stats.fragment_sd);
  CHECK(report.median.fragment_rs == stats.fragment_rs);
  CHECK(report.mean.novel_unigram_conc == stats.novel_unigram_conc);
}

TEST_CASE("aggregate means equal an independent recount") {
  vstest::Rng rng(405);
  TokenizerModel m = vs::train_bpe(vstest::general_fixture_corpus(250, 62), 400);
  std::vector<vs::PairedRecord> records;
  for (int i = 0; i < 40; ++i) {
    std::string sd, rs;
    for (int w = 0; w < 15; ++w) sd += rng.pick(vstest::common_words()) + " ";
    for (int w = 0; w < 5; ++w) rs += rng.pick(vstest::domain_terms()) + " ";
    records.push_back({"doc" + std::to_string(i), sd, rs});
  }
  vs::CorpusReport report = vs::corpus_report(m, records);
  double frag_sum = 0.0;
  for (const auto& rec : records) frag_sum += vs::fragment_score(m, rec.sd);
  CHECK(report.mean.fragment_sd ==
        doctest::Approx(frag_sum / static_cast<double>(records.size())).epsilon(1e-9));
}

TEST_CASE("short jargon-heavy documents score higher oov than long plain ones") {
  TokenizerModel general = vs::train_bpe(vstest::general_fixture_corpus(800, 63), 480);
  vstest::Rng rng(406);
  std::vector<vs::PairedRecord> medical, legal;
  for (int i = 0; i < 30; ++i) {
    std::string sd, rs;
    for (int w = 0; w < 25; ++w) {
      sd += (rng.unit() < 0.35 ? rng.pick(vstest::domain_terms())
                               : rng.pick(vstest::common_words())) +
            " ";
    }
    for (int w = 0; w < 8; ++w) {
      rs += (rng.unit() < 0.35 ? rng.pick(vstest::domain_terms())
                               : rng.pick(vstest::common_words())) +
            " ";
    }
    medical.push_back({"m" + std::to_string(i), sd, rs});
    std::string lsd, lrs;
    for (int w = 0; w < 120; ++w) {
      lsd += (rng.unit() < 0.05 ? rng.pick(vstest::domain_terms())
                                : rng.pick(vstest::common_words())) +
             " ";
    }
    for (int w = 0; w < 30; ++w) {
      lrs += (rng.unit() < 0.05 ? rng.pick(vstest::domain_terms())
                                : rng.pick(vstest::common_words())) +
             " ";
    }
    legal.push_back({"l" + std::to_string(i), lsd, lrs});
  }
  vs::CorpusReport med = vs::corpus_report(general, medical);
  vs::CorpusReport leg = vs::corpus_report(general, legal);
  CHECK(med.mean.sd_oov_conc > leg.mean.sd_oov_conc);
  CHECK(med.mean.rs_oov_conc > leg.mean.rs_oov_conc);
  CHECK(leg.mean.sd_token_count > med.mean.sd_token_count);
}

TEST_CASE("malformed corpus lines are reported with line numbers") {
  vstest::TempDir dir("badcorpus");
  vs::write_file_bytes(dir.file("c.jsonl"),
                       R"({"id":"a","sd":"x","rs":"y"}
not json at all
{"id":"b","sd":"x"}
{"id":"c","sd":"x","rs":"y"}
)");
  vs::PairedCorpus corpus = vs::read_paired_corpus(dir.file("c.jsonl"));
  CHECK(corpus.records.size() == 2);
  REQUIRE(corpus.errors.size() == 2);
  CHECK(corpus.errors[0].line == 2);
  CHECK(corpus.errors[1].line == 3);

  vs::write_file_bytes(dir.file("dup.jsonl"),
                       R"({"id":"a","sd":"x","rs":"y"}
{"id":"a","sd":"x","rs":"y"}
)");
  CHECK_THROWS_AS(vs::read_paired_corpus(dir.file("dup.jsonl")), vs::InputError);
}

TEST_CASE("csv emission carries the aggregate rows") {
  TokenizerModel m = osteo_base();
  std::vector<vs::PairedRecord> records = {{"d1", "o s", "o"}};
  vs::CorpusReport report = vs::corpus_report(m, records);
  std::string csv = vs::corpus_report_csv(report);
  CHECK(csv.find("sd_token_count") != std::string::npos);
  CHECK(csv.find("mean,") != std::string::npos);
  CHECK(csv.find("median,") != std::string::npos);
}

TEST_SUITE_END();
