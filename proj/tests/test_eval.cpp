#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "payattr/error.hpp"
#include "payattr/eval.hpp"
#include "payattr/random.hpp"
#include "support/synth_data.hpp"

namespace payattr {
namespace {

std::vector<LabeledUser> labeled(std::size_t a, std::size_t b) {
  std::vector<LabeledUser> out;
  for (std::size_t i = 0; i < a + b; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "u%05zu", i);
    out.push_back({id, i < a ? ClassLabel::class_a : ClassLabel::class_b, Task::politics});
  }
  return out;
}

std::size_t count_label(const std::vector<LabeledUser>& v, ClassLabel l) {
  return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [&](const auto& u) { return u.label == l; }));
}

TEST(Balance, DownsamplesMajority) {
  auto in = labeled(346, 218);
  auto out = balance_classes(in, 1);
  EXPECT_EQ(count_label(out, ClassLabel::class_a), 218u);
  EXPECT_EQ(count_label(out, ClassLabel::class_b), 218u);
  // subset of the input, input order kept
  std::size_t j = 0;
  for (const auto& u : out) {
    while (j < in.size() && !(in[j] == u)) ++j;
    ASSERT_LT(j, in.size());
    ++j;
  }
  auto other = balance_classes(in, 2);
  EXPECT_EQ(other.size(), out.size());
  EXPECT_NE(other, out);
  EXPECT_EQ(balance_classes(in, 1), out);
}

TEST(Balance, BalancedInputUnchangedAndSingleClassRejected) {
  auto in = labeled(30, 30);
  EXPECT_EQ(balance_classes(in, 5), in);
  EXPECT_THROW(balance_classes(labeled(4, 0), 1), SingleClass);
}

void check_plan(const FoldPlan& plan, std::span<const int> labels) {
  const std::size_t n = labels.size();
  std::vector<int> seen(n, 0);
  std::size_t pos_total = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  for (const auto& fold : plan.folds) {
    ASSERT_TRUE(std::is_sorted(fold.begin(), fold.end()));
    std::size_t pos = 0;
    for (auto r : fold) {
      ASSERT_LT(r, n);
      ++seen[r];
      pos += labels[r] == 1;
    }
    double expect_pos = static_cast<double>(pos_total) / static_cast<double>(plan.k);
    double expect_neg = static_cast<double>(n - pos_total) / static_cast<double>(plan.k);
    EXPECT_LE(std::abs(static_cast<double>(pos) - expect_pos), 1.0);
    EXPECT_LE(std::abs(static_cast<double>(fold.size() - pos) - expect_neg), 1.0);
  }
  for (int c : seen) ASSERT_EQ(c, 1);
}

TEST(KFold, FiveByFive) {
  std::vector<int> y{1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
  auto plan = stratified_kfold(y, 5, 3);
  ASSERT_EQ(plan.folds.size(), 5u);
  for (const auto& f : plan.folds) {
    ASSERT_EQ(f.size(), 2u);
    EXPECT_NE(y[f[0]], y[f[1]]);
  }
  check_plan(plan, y);
}

TEST(KFold, PropertiesOverRandomLabels) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t k = 2 + gen() % 9;
    std::size_t n = 2 * k + gen() % 200;
    std::vector<int> y(n);
    for (auto& v : y) v = static_cast<int>(gen() % 2);
    auto pos = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
    if (pos < k || n - pos < k) {
      EXPECT_THROW(stratified_kfold(y, k, trial), TooFewSamples);
      continue;
    }
    auto plan = stratified_kfold(y, k, static_cast<std::uint64_t>(trial));
    EXPECT_EQ(plan.k, k);
    check_plan(plan, y);
    EXPECT_EQ(stratified_kfold(y, k, static_cast<std::uint64_t>(trial)).folds, plan.folds);
  }
}

TEST(KFold, TooFewSamples) {
  std::vector<int> y{1, 1, 0, 0, 0, 0};
  EXPECT_THROW(stratified_kfold(y, 3, 1), TooFewSamples);
  EXPECT_THROW(stratified_kfold(y, 1, 1), TooFewSamples);
  EXPECT_NO_THROW(stratified_kfold(y, 2, 1));
  std::vector<int> one_class(10, 1);
  EXPECT_THROW(stratified_kfold(one_class, 2, 1), TooFewSamples);
}

// Every user has a private token; with min_df 1 a fold's vocabulary must
// still contain none of the held-out users' tokens, and the scaler must be
// the statistics of the training rows alone.
TEST(CrossValidate, NoTestFoldLeakage) {
  Dataset d;
  d.task = Task::politics;
  d.engineered_names = {"e0", "e1"};
  for (int i = 0; i < 20; ++i) {
    bool a = i % 2 == 0;
    d.user_ids.push_back("u" + std::to_string(i));
    std::string own = "private" + std::to_string(i);
    d.posts.push_back({tokenize_post(a ? "brunch yoga " + own : "beer golf " + own), tokenize_post(own + " again")});
    d.engineered.push_back({static_cast<double>(i), a ? 100.0 + i * i : -3.0 * i});
    d.labels.push_back(a ? 1 : 0);
  }
  auto plan = stratified_kfold(d.labels, 4, 9);
  PipelineConfig cfg;
  cfg.min_df = 1;
  auto cv = cross_validate(d, plan, cfg, true);
  ASSERT_EQ(cv.fitted.size(), 4u);
  for (std::size_t f = 0; f < 4; ++f) {
    const auto& fitted = cv.fitted[f];
    std::set<std::size_t> test(plan.folds[f].begin(), plan.folds[f].end());
    std::vector<std::vector<double>> train_eng;
    std::size_t n_train = 0;
    for (std::size_t r = 0; r < d.size(); ++r) {
      std::string own = "private" + std::to_string(r);
      if (test.count(r)) {
        EXPECT_FALSE(fitted.vocabulary.find(own).has_value()) << own;
        EXPECT_FALSE(fitted.vocabulary.find(own + " again").has_value());
      } else {
        EXPECT_TRUE(fitted.vocabulary.find(own).has_value()) << own;
        train_eng.push_back(d.engineered[r]);
        ++n_train;
      }
    }
    EXPECT_EQ(fitted.vocabulary.n_documents(), n_train);
    auto expect = fit_scaler(train_eng);
    EXPECT_EQ(fitted.scaler.mean, expect.mean);
    EXPECT_EQ(fitted.scaler.stddev, expect.stddev);
    auto names = fitted.feature_names();
    EXPECT_EQ(names.size(), fitted.vocabulary.size() + 2);
    for (auto r : plan.folds[f]) {
      EXPECT_EQ(std::find(names.begin(), names.end(), "private" + std::to_string(r)), names.end());
    }
  }
}

SynthSpec small_spec(double p_signal, double p_noise, std::uint64_t seed, std::size_t per_class = 100) {
  SynthSpec s;
  s.users_per_class = per_class;
  s.min_posts = s.max_posts = 8;
  s.p_signal = p_signal;
  s.p_noise = p_noise;
  s.seed = seed;
  return s;
}

TEST(CrossValidate, PerfectOnSeparableData) {
  auto d = test::synth_dataset(small_spec(1.0, 0.0, 4, 40));
  auto plan = stratified_kfold(d.labels, 5, 1);
  // text alone separates the classes; engineered columns are noise here
  PipelineConfig cfg;
  cfg.use_engineered = false;
  auto cv = cross_validate(d, plan, cfg);
  for (double a : cv.fold_accuracies) EXPECT_EQ(a, 1.0);
  EXPECT_EQ(cv.confusion[0][1] + cv.confusion[1][0], 0u);
  EXPECT_EQ(cv.confusion[0][0] + cv.confusion[1][1], d.size());
}

TEST(CrossValidate, ShuffledLabelsNearChance) {
  auto d = test::synth_dataset(small_spec(0.6, 0.1, 8, 200));
  std::mt19937_64 gen(3);
  std::shuffle(d.labels.begin(), d.labels.end(), gen);
  auto plan = stratified_kfold(d.labels, 5, 2);
  auto cv = cross_validate(d, plan, {});
  EXPECT_NEAR(cv.mean_accuracy, 0.5, 0.1);
}

GridSpec single(const PipelineConfig& cfg) {
  GridSpec g;
  g.vectorizers = {cfg.vectorizer};
  g.n_ranges = {cfg.n_range};
  g.c_values = {cfg.svm.C};
  g.classifiers = {cfg.classifier};
  g.base = cfg;
  return g;
}

TEST(GridSearch, SingleConfigEqualsCrossValidate) {
  auto d = test::synth_dataset(small_spec(0.4, 0.15, 5, 60));
  auto plan = stratified_kfold(d.labels, 5, 6);
  PipelineConfig cfg;
  cfg.svm.C = 0.5;
  auto grid = single(cfg);
  ASSERT_EQ(grid.expand().size(), 1u);
  auto report = grid_search(grid, plan, d);
  auto cv = cross_validate(d, plan, cfg);
  ASSERT_EQ(report.results.size(), 1u);
  EXPECT_EQ(report.results[0].cv.fold_accuracies, cv.fold_accuracies);
  EXPECT_EQ(report.results[0].cv.mean_accuracy, cv.mean_accuracy);
  EXPECT_EQ(report.results[0].cv.confusion, cv.confusion);
  EXPECT_EQ(report.best, 0u);
}

// Both classes use the same two words, only their order differs, so the
// unigram pipeline sees identical distributions and only bigrams separate.
TEST(GridSearch, SelectsBigramsWhenOnlyWordOrderCarriesSignal) {
  auto spec = small_spec(0.9, 0.0, 12, 60);
  spec.signal_a = {"pizza night"};
  spec.signal_b = {"night pizza"};
  auto d = test::synth_dataset(spec);
  auto plan = stratified_kfold(d.labels, 5, 1);
  GridSpec g;
  g.vectorizers = {VectorizerKind::tfidf};
  g.n_ranges = {{1, 1}, {1, 2}};
  g.c_values = {1.0};
  g.classifiers = {ClassifierKind::svm};
  g.base.use_engineered = false;
  auto report = grid_search(g, plan, d);
  ASSERT_EQ(report.results.size(), 2u);
  EXPECT_EQ(report.best, 1u);
  EXPECT_EQ(report.best_model.config.n_range, (NgramRange{1, 2}));
  EXPECT_GT(report.results[1].cv.mean_accuracy, report.results[0].cv.mean_accuracy + 0.2);
}

TEST(GridSearch, MeansAreFoldAveragesAndReportIsDeterministic) {
  auto d = test::synth_dataset(small_spec(0.4, 0.15, 2, 50));
  auto plan = stratified_kfold(d.labels, 4, 8);
  GridSpec g;
  g.c_values = {0.1, 1.0};
  g.classifiers = {ClassifierKind::svm, ClassifierKind::gbdt};
  g.base.gbdt.rounds = 20;
  auto one = grid_search(g, plan, d, 1);
  auto three = grid_search(g, plan, d, 3);
  EXPECT_EQ(one.to_json().dump(), three.to_json().dump());
  EXPECT_EQ(one.to_json().dump(), grid_search(g, plan, d, 2).to_json().dump());
  EXPECT_EQ(one.results.size(), g.expand().size());
  double best = -1.0;
  for (const auto& r : one.results) {
    const auto& f = r.cv.fold_accuracies;
    ASSERT_EQ(f.size(), 4u);
    EXPECT_NEAR(r.cv.mean_accuracy, std::accumulate(f.begin(), f.end(), 0.0) / 4.0, 1e-12);
    for (double a : f) {
      EXPECT_GE(a, 0.0);
      EXPECT_LE(a, 1.0);
    }
    best = std::max(best, r.cv.mean_accuracy);
  }
  EXPECT_EQ(one.results[one.best].cv.mean_accuracy, best);
  for (std::size_t i = 0; i < one.best; ++i) EXPECT_LT(one.results[i].cv.mean_accuracy, best);
}

TEST(GridSpec, ExpansionOrderAndJson) {
  GridSpec g;
  auto configs = g.expand();
  // 2 vectorizers x 2 ranges x (5 svm + mlp + gbdt)
  ASSERT_EQ(configs.size(), 28u);
  EXPECT_EQ(configs[0].vectorizer, VectorizerKind::count);
  EXPECT_EQ(configs[0].svm.C, 0.01);
  EXPECT_EQ(configs[5].classifier, ClassifierKind::mlp);
  EXPECT_EQ(configs[7].n_range, (NgramRange{1, 2}));
  auto back = GridSpec::from_json(g.to_json());
  EXPECT_EQ(back.to_json(), g.to_json());
  EXPECT_THROW(GridSpec::from_json(nlohmann::json{{"classifier", {"forest"}}}), ConfigError);
}

TEST(Pipeline, SaveLoadRoundTrip) {
  auto d = test::synth_dataset(small_spec(0.6, 0.1, 3, 30));
  std::vector<std::size_t> rows(d.size());
  std::iota(rows.begin(), rows.end(), 0);
  auto p = fit_pipeline(d, rows, {});
  auto back = pipeline_from_json(pipeline_to_json(p));
  EXPECT_EQ(back.predict(d.posts, d.engineered), p.predict(d.posts, d.engineered));
  EXPECT_EQ(pipeline_to_json(back).dump(), pipeline_to_json(p).dump());
}

}  // namespace
}  // namespace payattr
