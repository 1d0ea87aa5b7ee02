#include <cstdlib>
#include <thread>

#include "doctest.h"
#include "support/test_util.hpp"
#include "vs/tokenizer.hpp"
#include "vs/tokenizer_io.hpp"

using vs::TokenId;
using vs::TokenizerModel;

namespace {

std::vector<std::string> byte_vocab() {
  std::vector<std::string> vocab(vs::kByteTokenCount);
  for (std::size_t b = 0; b < vs::kByteTokenCount; ++b) vocab[b] = std::string(1, static_cast<char>(b));
  return vocab;
}

TokenizerModel minimal_ab_model() {
  auto vocab = byte_vocab();
  vocab.push_back("ab");
  return TokenizerModel::build(std::move(vocab), {{"a", "b"}});
}

}  // namespace

TEST_SUITE_BEGIN("tokenizer");

TEST_CASE("minimal model: 256 byte tokens plus one merge") {
  TokenizerModel m = minimal_ab_model();
  CHECK(m.vocab_size() == 257);
  CHECK(m.token_bytes(256) == "ab");
  CHECK(m.find("ab") == TokenId{256});
  CHECK(m.merges().size() == 1);
}

TEST_CASE("build rejects dangling merge result") {
  auto vocab = byte_vocab();  // no "ac" token
  CHECK_THROWS_WITH_AS(TokenizerModel::build(std::move(vocab), {{"a", "c"}}),
                       doctest::Contains("dangling merge result"), vs::ValidationError);
}

TEST_CASE("build rejects merges over unknown tokens") {
  auto vocab = byte_vocab();
  vocab.push_back("xyz");
  CHECK_THROWS_AS(TokenizerModel::build(std::move(vocab), {{"xy", "z"}}), vs::ValidationError);
}

TEST_CASE("build rejects duplicate producers and bad byte tokens") {
  SUBCASE("two merges for one result") {
    auto vocab = byte_vocab();
    vocab.push_back("ab");
    CHECK_THROWS_AS(TokenizerModel::build(std::move(vocab), {{"a", "b"}, {"a", "b"}}),
                    vs::ValidationError);
  }
  SUBCASE("byte slot holds the wrong string") {
    auto vocab = byte_vocab();
    vocab[97] = "zz";
    CHECK_THROWS_AS(TokenizerModel::build(std::move(vocab), {}), vs::ValidationError);
  }
  SUBCASE("duplicate token strings") {
    auto vocab = byte_vocab();
    vocab.push_back("ab");
    vocab.push_back("ab");
    CHECK_THROWS_AS(TokenizerModel::build(std::move(vocab), {{"a", "b"}}), vs::ValidationError);
  }
  SUBCASE("operand produced at a later rank") {
    auto vocab = byte_vocab();
    vocab.push_back("ab");
    vocab.push_back("abc");
    CHECK_THROWS_AS(TokenizerModel::build(std::move(vocab), {{"ab", "c"}, {"a", "b"}}),
                    vs::ValidationError);
  }
}

TEST_CASE("encode applies the single merge") {
  TokenizerModel m = minimal_ab_model();
  CHECK(m.encode("ab") == std::vector<TokenId>{256});
  CHECK(m.encode("") == std::vector<TokenId>{});
  CHECK(m.encode("ba") == std::vector<TokenId>{98, 97});
}

TEST_CASE("decode basics") {
  TokenizerModel m = minimal_ab_model();
  CHECK(m.decode_bytes(std::vector<TokenId>{}) == "");
  CHECK(m.decode_bytes(std::vector<TokenId>{256, 97}) == "aba");
  CHECK(m.decode_bytes(std::vector<TokenId>{0xE2}).size() == 1);  // byte fallback, byte mode
  CHECK(m.decode_text(std::vector<TokenId>{0xE2}) == "\xEF\xBF\xBD");
  CHECK_THROWS_AS(m.decode_bytes(std::vector<TokenId>{9999}), vs::InputError);
}

TEST_CASE("unknown word still fragments into multiple tokens") {
  auto corpus = vstest::general_fixture_corpus(300);
  TokenizerModel m = vs::train_bpe(corpus, 500);
  auto ids = m.encode("Osteoporosis");
  CHECK(ids.size() >= 2);
  CHECK(m.decode_bytes(ids) == "Osteoporosis");
}

TEST_CASE("train: dominant pair merges first") {
  std::vector<std::string> corpus = {"aaaa aaaa"};
  TokenizerModel m = vs::train_bpe(corpus, 258);
  CHECK(m.vocab_size() == 258);
  CHECK(m.token_bytes(256) == "aa");
  CHECK(m.token_bytes(257) == "aaaa");
}

TEST_CASE("train: repeated word becomes a single token") {
  std::vector<std::string> corpus(40, "osteoporosis osteoporosis");
  TokenizerModel m = vs::train_bpe(corpus, 270);
  auto ids = m.encode("osteoporosis");
  CHECK(ids.size() == 1);
  CHECK(m.token_bytes(ids[0]) == "osteoporosis");
}

TEST_CASE("train: ties break lexicographically") {
  std::vector<std::string> corpus = {"ab cd ab cd"};
  TokenizerModel m = vs::train_bpe(corpus, 258);
  CHECK(m.token_bytes(256) == "ab");  // (a,b) < (c,d)
}

TEST_CASE("train rejects bad inputs") {
  std::vector<std::string> corpus = {"some text"};
  CHECK_THROWS_AS(vs::train_bpe(corpus, 100), vs::InputError);
  CHECK_THROWS_AS(vs::train_bpe(corpus, 256), vs::InputError);
  std::vector<std::string> empty;
  CHECK_THROWS_AS(vs::train_bpe(empty, 300), vs::InputError);
  std::vector<std::string> blank = {"", ""};
  CHECK_THROWS_AS(vs::train_bpe(blank, 300), vs::InputError);
}

TEST_CASE("train: merges never have frequency below 2") {
  // Tiny corpus with a large budget: training stops instead of inventing
  // singleton merges.
  std::vector<std::string> corpus = {"abc abc xyzw"};
  TokenizerModel m = vs::train_bpe(corpus, 1000);
  CHECK(m.vocab_size() < 1000);
  CHECK(m.encode("abc").size() == 1);
  CHECK(m.encode("xyzw").size() == 4);  // seen once, never merged
}

TEST_CASE("rank monotonicity: replaying merges rebuilds the vocabulary") {
  vstest::Rng rng(42);
  TokenizerModel m = vstest::random_toy_model(rng, 600);
  REQUIRE(m.vocab_size() == vs::kByteTokenCount + m.merges().size());
  for (std::size_t rank = 0; rank < m.merges().size(); ++rank) {
    const vs::MergeRule& rule = m.merges()[rank];
    CHECK(rule.result == vs::kByteTokenCount + rank);
    CHECK(m.token_bytes(rule.result) ==
          m.token_bytes(rule.left) + m.token_bytes(rule.right));
    CHECK(m.producing_rank(rule.result) == rank);
  }
}

TEST_CASE("totality: decode(encode(s)) == s byte-exactly") {
  vstest::Rng rng(7);
  TokenizerModel m = vstest::random_toy_model(rng);
  for (int i = 0; i < 300; ++i) {
    std::string s = vstest::random_test_string(rng, "abcdef");
    auto ids = m.encode(s);
    CHECK(m.decode_bytes(ids) == s);
  }
}

TEST_CASE("fast encoder matches the brute-force reference") {
  vstest::Rng rng(99);
  for (int trial = 0; trial < 5; ++trial) {
    TokenizerModel m = vstest::random_toy_model(rng, 700);
    for (int i = 0; i < 40; ++i) {
      std::string s = vstest::random_test_string(rng, "abcde", 96);
      CHECK(m.encode(s) == vstest::reference_encode(m, s));
    }
  }
}

TEST_CASE("training determinism: identical corpus gives identical bytes") {
  auto corpus = vstest::general_fixture_corpus(200);
  TokenizerModel a = vs::train_bpe(corpus, 400);
  TokenizerModel b = vs::train_bpe(corpus, 400);
  CHECK(vs::save_tokenizer(a) == vs::save_tokenizer(b));
}

TEST_CASE("token_frequencies") {
  TokenizerModel m = minimal_ab_model();
  SUBCASE("empty corpus maps everything to zero") {
    std::vector<std::string> corpus;
    auto counts = vs::token_frequencies(m, corpus);
    REQUIRE(counts.size() == m.vocab_size());
    for (auto c : counts) CHECK(c == 0);
  }
  SUBCASE("counts match direct occurrence counting") {
    std::vector<std::string> corpus = {"ab ab"};
    auto counts = vs::token_frequencies(m, corpus);
    CHECK(counts[256] == 2);
    CHECK(counts[static_cast<TokenId>(' ')] == 1);
  }
  SUBCASE("sum of counts equals total encoded length") {
    vstest::Rng rng(5);
    TokenizerModel toy = vstest::random_toy_model(rng, 500);
    auto corpus = vstest::random_corpus(rng, 50, "abcd");
    auto counts = vs::token_frequencies(toy, corpus);
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    std::uint64_t expected = 0;
    for (const auto& doc : corpus) expected += toy.encode(doc).size();
    CHECK(total == expected);
  }
}

TEST_CASE("lowercase config folds input before encoding") {
  std::vector<std::string> corpus = {"hello hello world world"};
  vs::PreTokenizerConfig cfg;
  cfg.lowercase = true;
  TokenizerModel m = vs::train_bpe(corpus, 300, cfg);
  CHECK(m.encode("HELLO") == m.encode("hello"));
  CHECK(m.decode_bytes(m.encode("HELLO")) == "hello");
  // the flag survives the interchange format
  TokenizerModel loaded = vs::load_tokenizer(vs::save_tokenizer(m));
  CHECK(loaded.config().lowercase);
  CHECK(loaded.encode("HELLO") == m.encode("hello"));
}

TEST_CASE("results are independent of the worker count") {
  vstest::Rng rng(14);
  TokenizerModel m = vstest::random_toy_model(rng, 500);
  auto corpus = vstest::random_corpus(rng, 60, "abcd");
  setenv("VOCAB_SURGEON_THREADS", "1", 1);
  auto serial = vs::token_frequencies(m, corpus);
  setenv("VOCAB_SURGEON_THREADS", "7", 1);
  auto parallel = vs::token_frequencies(m, corpus);
  unsetenv("VOCAB_SURGEON_THREADS");
  CHECK(serial == parallel);
}

TEST_CASE("shared model encodes identically across threads") {
  vstest::Rng rng(12);
  TokenizerModel m = vstest::random_toy_model(rng, 500);
  std::string text = "abba ccdd abc";
  auto expected = m.encode(text);
  std::vector<std::vector<TokenId>> results(4);
  std::vector<std::thread> pool;
  for (int t = 0; t < 4; ++t) {
    pool.emplace_back([&, t] { results[t] = m.encode(text); });
  }
  for (auto& t : pool) t.join();
  for (const auto& r : results) CHECK(r == expected);
}

TEST_SUITE_END();
