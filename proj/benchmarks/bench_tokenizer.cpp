#include <benchmark/benchmark.h>

#include "support/test_util.hpp"
#include "vs/metrics.hpp"
#include "vs/tokenizer.hpp"

namespace {

const vs::TokenizerModel& bench_model() {
  static vs::TokenizerModel model =
      vs::train_bpe(vstest::general_fixture_corpus(2000, 7), 1000);
  return model;
}

std::string bench_text(std::size_t words) {
  vstest::Rng rng(8);
  std::string text;
  for (std::size_t w = 0; w < words; ++w) {
    if (w) text += ' ';
    text += rng.unit() < 0.2 ? rng.pick(vstest::domain_terms())
                             : rng.pick(vstest::common_words());
  }
  return text;
}

void BM_Encode(benchmark::State& state) {
  const vs::TokenizerModel& model = bench_model();
  std::string text = bench_text(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.encode(text));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Encode)->Arg(64)->Arg(1024)->Arg(16384);

void BM_Train(benchmark::State& state) {
  auto corpus = vstest::general_fixture_corpus(static_cast<std::size_t>(state.range(0)), 9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(vs::train_bpe(corpus, 600));
  }
}
BENCHMARK(BM_Train)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_FragmentScore(benchmark::State& state) {
  const vs::TokenizerModel& model = bench_model();
  std::string text = bench_text(4096);
  for (auto _ : state) {
    benchmark::DoNotOptimize(vs::fragment_score(model, text));
  }
}
BENCHMARK(BM_FragmentScore);

}  // namespace

BENCHMARK_MAIN();
