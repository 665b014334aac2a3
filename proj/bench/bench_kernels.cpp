// Serial reference vs OpenMP kernels on a corpus built by replicating the
// fixture. Run: build/bench/peerlex_bench --benchmark_counters_tabular=true

#include <benchmark/benchmark.h>

#include <random>

#include "peerlex/metrics.hpp"
#include "peerlex/report.hpp"
#include "peerlex/stats.hpp"

using namespace peerlex;

namespace {

std::filesystem::path fixture(const char* name) {
  return std::filesystem::path(PEERLEX_SOURCE_DIR) / "data" / "fixture" / name;
}

struct World {
  Lexicon lexicon = Lexicon::load(fixture("lexicon.dic"));
  EmbeddingTable embeddings = EmbeddingTable::load(fixture("embeddings.bin"), EmbeddingFormat::binary);
  Corpus corpus;

  explicit World(int copies) {
    const auto base = load_corpus(fixture("posts.jsonl"), fixture("responses.jsonl"));
    for (int c = 0; c < copies; ++c) {
      const std::string tag = "#" + std::to_string(c);
      for (std::size_t i = 0; i < base.posts().size(); ++i) {
        Post p = base.posts()[i];
        p.post_id += tag;
        corpus.add_post(p);
        for (Response r : base.responses_for(i)) {
          r.response_id += tag;
          r.post_id = p.post_id;
          corpus.add_response(r);
        }
      }
    }
  }

  MeasureResources resources() const {
    MeasureResources r;
    r.lexicon = &lexicon;
    r.embeddings = &embeddings;
    return r;
  }
};

const World& world() {
  static const World w(40);
  return w;
}

void BM_MeasureSerial(benchmark::State& state) {
  const auto& w = world();
  for (auto _ : state) benchmark::DoNotOptimize(measure_corpus_serial(w.corpus, w.resources(), {}));
  state.counters["responses"] = static_cast<double>(w.corpus.response_count());
}

void BM_MeasureOpenMP(benchmark::State& state) {
  const auto& w = world();
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(measure_corpus(w.corpus, w.resources(), {}, workers));
  state.counters["responses"] = static_cast<double>(w.corpus.response_count());
}

void BM_TableBuild(benchmark::State& state) {
  const auto& w = world();
  static const auto rows = measure_corpus(w.corpus, w.resources(), {}, 4);
  report::Options options;
  options.workers = static_cast<int>(state.range(0));
  std::vector<std::string> family;
  for (const auto& c : w.lexicon.categories()) family.push_back(metric::lexicon_metric(c.name));
  for (auto _ : state)
    benchmark::DoNotOptimize(report::build_comparison_table(rows, w.corpus, "stub-a", family, options));
}

void BM_KsStatistic(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> a(static_cast<std::size_t>(state.range(0))), b(a.size());
  for (auto& x : a) x = n(rng);
  for (auto& x : b) x = n(rng) + 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(stats::ks_two_sample(a, b));
  state.SetComplexityN(state.range(0));
}

}  // namespace

BENCHMARK(BM_MeasureSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MeasureOpenMP)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TableBuild)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KsStatistic)->RangeMultiplier(4)->Range(64, 65536)->Complexity();

BENCHMARK_MAIN();
