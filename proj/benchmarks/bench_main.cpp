#include <benchmark/benchmark.h>

#include <numeric>

#include "payattr/corpus.hpp"
#include "payattr/eval.hpp"
#include "payattr/model.hpp"
#include "payattr/synth.hpp"
#include "payattr/tokenize.hpp"
#include "payattr/vectorize.hpp"

namespace {

using namespace payattr;

const SynthCorpus& corpus() {
  static const SynthCorpus c = [] {
    SynthSpec s;
    s.users_per_class = 500;
    s.min_posts = s.max_posts = 8;
    s.seed = 1;
    return generate_synthetic_corpus(s);
  }();
  return c;
}

const Dataset& dataset() {
  static const Dataset d = [] {
    std::vector<LabeledUser> labeled;
    for (const auto& [id, l] : corpus().labels) labeled.push_back({id, l, Task::politics});
    return build_dataset(group_by_user(corpus().transactions), labeled);
  }();
  return d;
}

void BM_Tokenize(benchmark::State& state) {
  const auto& ts = corpus().transactions;
  std::size_t bytes = 0;
  for (const auto& t : ts) bytes += t.note.size();
  for (auto _ : state) {
    for (const auto& t : ts) benchmark::DoNotOptimize(tokenize_post(t.note));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * bytes));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * ts.size()));
}
BENCHMARK(BM_Tokenize);

void BM_TfidfFitTransform(benchmark::State& state) {
  const auto& d = dataset();
  for (auto _ : state) {
    auto vocab = fit_vocabulary(d.posts, {1, 2}, 2);
    benchmark::DoNotOptimize(tfidf_transform(count_transform(d.posts, vocab), vocab));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * d.size()));
}
BENCHMARK(BM_TfidfFitTransform);

void BM_SvmTrain(benchmark::State& state) {
  const auto& d = dataset();
  auto vocab = fit_vocabulary(d.posts, {1, 2}, 2);
  auto x = tfidf_transform(count_transform(d.posts, vocab), vocab);
  std::vector<int> y;
  for (int l : d.labels) y.push_back(l ? 1 : -1);
  const double c = static_cast<double>(state.range(0)) / 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(train_linear_svm(x, y, {.C = c}));
}
BENCHMARK(BM_SvmTrain)->Arg(10)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_CrossValidate(benchmark::State& state) {
  const auto& d = dataset();
  auto plan = stratified_kfold(d.labels, 5, 1);
  for (auto _ : state) benchmark::DoNotOptimize(cross_validate(d, plan, {}));
}
BENCHMARK(BM_CrossValidate)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
