#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "eqa/cloze.hpp"
#include "eqa/eval.hpp"
#include "eqa/unans.hpp"

namespace {

const std::string kContext =
    "As the \"Bad Boys\" era was fading, they were eliminated in five games in the "
    "first round of the playoffs by the New York Knicks. The Pistons would not return "
    "to the playoffs until 1996. Following the season, Chuck Daly left to coach the "
    "New Jersey Nets, and John Salley was traded to the Miami Heat. Meanwhile, the "
    "Bulls-Pistons rivalry took another ugly turn as Thomas was left off the Dream "
    "Team coached by Daly, reportedly at the request of Michael Jordan.";

void BM_NormalizeAnswer(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(eqa::eval::normalize_answer(kContext));
  }
}
BENCHMARK(BM_NormalizeAnswer);

void BM_TokenF1(benchmark::State& state) {
  const auto a = eqa::eval::normalize_answer("the New Jersey Nets in 1996");
  const auto b = eqa::eval::normalize_answer(kContext);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eqa::eval::token_f1(a, b));
  }
}
BENCHMARK(BM_TokenF1);

void BM_ExtractCandidates(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(eqa::cloze::extract_candidates(kContext));
  }
}
BENCHMARK(BM_ExtractCandidates);

void BM_GenerateAnswerableDataset(benchmark::State& state) {
  std::vector<eqa::squad::Article> corpus;
  for (int i = 0; i < static_cast<int>(state.range(0)); ++i) {
    corpus.push_back({"Article " + std::to_string(i), {{kContext, {}}, {kContext, {}}}});
  }
  eqa::cloze::GenerationConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eqa::cloze::generate_answerable_dataset(corpus, cfg));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GenerateAnswerableDataset)->Arg(16)->Arg(64);

void BM_OverlapScore(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        eqa::unans::overlap_score("Who left to coach the New Jersey Nets ?", kContext));
  }
}
BENCHMARK(BM_OverlapScore);

}  // namespace

BENCHMARK_MAIN();
