// Serial reference vs OpenMP kernels. Thread counts are the benchmark arg.
#include <benchmark/benchmark.h>

#include <random>
#include <sstream>

#include "json.hpp"
#include "qintent/evaluation.hpp"
#include "qintent/labeling.hpp"
#include "qintent/synthetic.hpp"

using namespace qintent;

namespace {

const std::vector<Query>& queries() {
  static const auto qs = [] {
    std::vector<Query> out;
    for (const auto& s : synthetic_queries(60000, 1)) out.push_back(Query::make(s.text, s.id));
    return out;
  }();
  return qs;
}

const std::string& corpus() {
  static const auto text = [] {
    std::string out;
    for (const auto& q : queries()) out += nlohmann::json{{"id", q.id()}, {"query", q.text()}}.dump() + "\n";
    return out;
  }();
  return text;
}

struct Systems {
  std::vector<IntentLabel> gold;
  AlignedPredictions a, b;
};

const Systems& systems() {
  static const auto s = [] {
    Systems s;
    std::mt19937_64 rng(3);
    for (int i = 0; i < 2000; ++i) {
      s.gold.push_back(kAllLabels[rng() % 3]);
      s.a.push_back(rng() % 4 ? s.gold.back() : kAllLabels[rng() % 3]);
      s.b.push_back(rng() % 3 ? s.gold.back() : kAllLabels[rng() % 3]);
    }
    return s;
  }();
  return s;
}

void BM_label_all_serial(benchmark::State& st) {
  const PosTagger tagger;
  for (auto _ : st) benchmark::DoNotOptimize(label_all_serial(queries(), FunctionSet::builtin(), tagger));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(queries().size()));
}

void BM_label_all(benchmark::State& st) {
  const PosTagger tagger;
  const int workers = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(label_all(queries(), FunctionSet::builtin(), tagger, workers));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(queries().size()));
}

void BM_label_corpus_serial(benchmark::State& st) {
  const PosTagger tagger;
  for (auto _ : st) {
    std::istringstream in(corpus());
    std::ostringstream out;
    benchmark::DoNotOptimize(label_corpus_serial(in, out, FunctionSet::builtin(), tagger, {}));
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(queries().size()));
}

void BM_label_corpus(benchmark::State& st) {
  const PosTagger tagger;
  CorpusOptions opts;
  opts.workers = static_cast<int>(st.range(0));
  for (auto _ : st) {
    std::istringstream in(corpus());
    std::ostringstream out;
    benchmark::DoNotOptimize(label_corpus(in, out, FunctionSet::builtin(), tagger, opts));
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(queries().size()));
}

void BM_permutation_serial(benchmark::State& st) {
  const auto& s = systems();
  PermutationOptions opts;
  opts.iterations = 2000;
  for (auto _ : st) benchmark::DoNotOptimize(paired_permutation_test_serial(s.a, s.b, s.gold, Metric::F1, opts));
}

void BM_permutation(benchmark::State& st) {
  const auto& s = systems();
  PermutationOptions opts;
  opts.iterations = 2000;
  opts.workers = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(paired_permutation_test(s.a, s.b, s.gold, Metric::F1, opts));
}

}  // namespace

BENCHMARK(BM_label_all_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_label_all)->RangeMultiplier(2)->Range(1, 8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_label_corpus_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_label_corpus)->RangeMultiplier(2)->Range(1, 8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_permutation_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_permutation)->RangeMultiplier(2)->Range(1, 8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
