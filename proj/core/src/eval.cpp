#include "payattr/eval.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <numeric>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "payattr/error.hpp"
#include "payattr/random.hpp"

namespace payattr {

using nlohmann::json;

Dataset build_dataset(const Corpus& corpus, const std::vector<LabeledUser>& labeled, const FeatureOptions& features,
                      const Lexicons& lexicons) {
  Dataset data;
  data.engineered_names = engineered_column_names(features);
  if (!labeled.empty()) data.task = labeled.front().task;
  std::unordered_map<std::string, TokenizedPost> cache;
  for (const LabeledUser& user : labeled) {
    auto it = corpus.users.find(user.user_id);
    if (it == corpus.users.end() || it->second.posts.empty()) continue;
    const UserProfile& profile = it->second;
    UserPosts posts;
    posts.reserve(profile.posts.size());
    for (const Post& post : profile.posts) {
      auto [entry, inserted] = cache.try_emplace(post.transaction->id);
      if (inserted) entry->second = tokenize_post(post.transaction->note, lexicons);
      posts.push_back(entry->second);
    }
    data.engineered.push_back(aggregate_user_features(profile, posts, features, lexicons).values());
    data.posts.push_back(std::move(posts));
    data.user_ids.push_back(user.user_id);
    data.labels.push_back(user.label == ClassLabel::class_a ? 1 : 0);
  }
  return data;
}

std::vector<LabeledUser> balance_classes(const std::vector<LabeledUser>& labeled, std::uint64_t seed) {
  std::vector<std::size_t> a, b;
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    (labeled[i].label == ClassLabel::class_a ? a : b).push_back(i);
  }
  if (a.empty() || b.empty()) throw SingleClass("cannot balance: only one class present");
  std::vector<std::size_t>& major = a.size() >= b.size() ? a : b;
  const std::size_t target = std::min(a.size(), b.size());
  Rng rng(seed);
  rng.shuffle(major);
  major.resize(target);
  std::vector<bool> keep(labeled.size(), false);
  for (std::size_t i : a) keep[i] = true;
  for (std::size_t i : b) keep[i] = true;
  std::vector<LabeledUser> out;
  out.reserve(2 * target);
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    if (keep[i]) out.push_back(labeled[i]);
  }
  return out;
}

FoldPlan stratified_kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw TooFewSamples("k must be at least 2");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  if (by_class.size() < 2) throw TooFewSamples("both classes need at least k=" + std::to_string(k) + " rows");
  for (const auto& [label, rows] : by_class) {
    if (rows.size() < k) {
      throw TooFewSamples("class " + std::to_string(label) + " has " + std::to_string(rows.size()) +
                          " rows, fewer than k=" + std::to_string(k));
    }
  }
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.folds.resize(k);
  Rng rng(seed);
  std::size_t next = 0;
  for (auto& [label, rows] : by_class) {
    rng.shuffle(rows);
    for (std::size_t row : rows) {
      plan.folds[next].push_back(row);
      next = (next + 1) % k;
    }
  }
  for (auto& fold : plan.folds) std::sort(fold.begin(), fold.end());
  return plan;
}

std::string_view to_string(VectorizerKind kind) { return kind == VectorizerKind::count ? "count" : "tfidf"; }

VectorizerKind parse_vectorizer(std::string_view s) {
  if (s == "count") return VectorizerKind::count;
  if (s == "tfidf") return VectorizerKind::tfidf;
  throw ConfigError("unknown vectorizer '" + std::string(s) + "' (expected count or tfidf)");
}

json PipelineConfig::to_json() const {
  return json{
      {"vectorizer", payattr::to_string(vectorizer)},
      {"n_range", {n_range.low, n_range.high}},
      {"min_df", min_df},
      {"use_engineered", use_engineered},
      {"normalize_counts", normalize_counts},
      {"classifier", payattr::to_string(classifier)},
      {"svm", {{"C", svm.C}, {"tol", svm.tol}, {"seed", svm.seed}}},
      {"mlp",
       {{"hidden", mlp.hidden},
        {"learning_rate", mlp.learning_rate},
        {"epochs", mlp.epochs},
        {"batch_size", mlp.batch_size},
        {"seed", mlp.seed}}},
      {"gbdt",
       {{"rounds", gbdt.rounds},
        {"max_depth", gbdt.max_depth},
        {"learning_rate", gbdt.learning_rate},
        {"seed", gbdt.seed},
        {"subsample", gbdt.subsample},
        {"min_samples_leaf", gbdt.min_samples_leaf}}},
  };
}

namespace {

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

NgramRange parse_range(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("n_range must be a [low, high] pair");
  NgramRange r{j[0].get<int>(), j[1].get<int>()};
  try {
    validate(r);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return r;
}

void apply_classifier_overrides(const json& j, PipelineConfig& c) {
  if (auto it = j.find("svm"); it != j.end()) {
    read_opt(*it, "C", c.svm.C);
    read_opt(*it, "tol", c.svm.tol);
    read_opt(*it, "seed", c.svm.seed);
  }
  if (auto it = j.find("mlp"); it != j.end()) {
    read_opt(*it, "hidden", c.mlp.hidden);
    read_opt(*it, "learning_rate", c.mlp.learning_rate);
    read_opt(*it, "epochs", c.mlp.epochs);
    read_opt(*it, "batch_size", c.mlp.batch_size);
    read_opt(*it, "seed", c.mlp.seed);
  }
  if (auto it = j.find("gbdt"); it != j.end()) {
    read_opt(*it, "rounds", c.gbdt.rounds);
    read_opt(*it, "max_depth", c.gbdt.max_depth);
    read_opt(*it, "learning_rate", c.gbdt.learning_rate);
    read_opt(*it, "seed", c.gbdt.seed);
    read_opt(*it, "subsample", c.gbdt.subsample);
    read_opt(*it, "min_samples_leaf", c.gbdt.min_samples_leaf);
  }
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const json& j, const PipelineConfig& base) {
  PipelineConfig c = base;
  try {
    if (auto it = j.find("vectorizer"); it != j.end()) c.vectorizer = parse_vectorizer(it->get<std::string>());
    if (auto it = j.find("n_range"); it != j.end()) c.n_range = parse_range(*it);
    read_opt(j, "min_df", c.min_df);
    read_opt(j, "use_engineered", c.use_engineered);
    read_opt(j, "normalize_counts", c.normalize_counts);
    if (auto it = j.find("classifier"); it != j.end()) c.classifier = parse_classifier(it->get<std::string>());
    apply_classifier_overrides(j, c);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad pipeline config: ") + e.what());
  }
  return c;
}

PipelineConfig PipelineConfig::from_json(const json& j) { return from_json(j, PipelineConfig{}); }

std::vector<std::string> FittedPipeline::feature_names() const {
  std::vector<std::string> names = vocabulary.terms();
  if (config.use_engineered) names.insert(names.end(), engineered_names.begin(), engineered_names.end());
  return names;
}

SparseMatrix FittedPipeline::transform(std::span<const UserPosts> posts,
                                       std::span<const std::vector<double>> engineered) const {
  SparseMatrix text = count_transform(posts, vocabulary);
  if (config.vectorizer == VectorizerKind::tfidf) {
    text = tfidf_transform(text, vocabulary);
  } else if (config.normalize_counts) {
    l2_normalize_rows(text);
  }
  if (!config.use_engineered) return text;
  return assemble_feature_matrix(text, engineered, &scaler).matrix;
}

std::vector<int> FittedPipeline::predict(std::span<const UserPosts> posts,
                                         std::span<const std::vector<double>> engineered) const {
  return predict_class_a(model, transform(posts, engineered));
}

namespace {

template <typename T>
std::vector<T> pick(const std::vector<T>& v, std::span<const std::size_t> rows) {
  std::vector<T> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(v[r]);
  return out;
}

}  // namespace

FittedPipeline fit_pipeline(const Dataset& data, std::span<const std::size_t> rows, const PipelineConfig& config) {
  FittedPipeline p;
  p.task = data.task;
  p.config = config;
  p.engineered_names = data.engineered_names;
  const auto posts = pick(data.posts, rows);
  const auto engineered = pick(data.engineered, rows);
  const auto labels = pick(data.labels, rows);

  p.vocabulary = fit_vocabulary(posts, config.n_range, config.min_df);
  SparseMatrix text = count_transform(posts, p.vocabulary);
  if (config.vectorizer == VectorizerKind::tfidf) {
    text = tfidf_transform(text, p.vocabulary);
  } else if (config.normalize_counts) {
    l2_normalize_rows(text);
  }
  SparseMatrix x = std::move(text);
  if (config.use_engineered) {
    AssembledMatrix assembled = assemble_feature_matrix(x, engineered);
    p.scaler = std::move(assembled.scaler);
    x = std::move(assembled.matrix);
  }
  const auto names = p.feature_names();
  switch (config.classifier) {
    case ClassifierKind::svm: {
      std::vector<int> signed_labels(labels.size());
      std::transform(labels.begin(), labels.end(), signed_labels.begin(), [](int v) { return v == 1 ? 1 : -1; });
      LinearSvmModel m = train_linear_svm(x, signed_labels, config.svm);
      m.feature_names = names;
      p.model = std::move(m);
      break;
    }
    case ClassifierKind::mlp: {
      MlpModel m = train_mlp(x, labels, config.mlp);
      m.feature_names = names;
      p.model = std::move(m);
      break;
    }
    case ClassifierKind::gbdt: {
      GbdtModel m = train_gbdt(x, labels, config.gbdt);
      m.feature_names = names;
      p.model = std::move(m);
      break;
    }
  }
  return p;
}

json pipeline_to_json(const FittedPipeline& p) {
  json j = model_to_json(p.model);
  j["pipeline"] = json{
      {"task", to_string(p.task)},
      {"config", p.config.to_json()},
      {"vocabulary", p.vocabulary.to_json()},
      {"scaler", p.scaler.to_json()},
      {"engineered_names", p.engineered_names},
  };
  return j;
}

FittedPipeline pipeline_from_json(const json& j) {
  FittedPipeline p;
  p.model = model_from_json(j);
  if (!j.contains("pipeline")) throw CorruptError("model file has no pipeline section");
  try {
    const json& s = j.at("pipeline");
    p.task = parse_task(s.at("task").get<std::string>());
    p.config = PipelineConfig::from_json(s.at("config"));
    p.vocabulary = Vocabulary::from_json(s.at("vocabulary"));
    p.scaler = ScalerStats::from_json(s.at("scaler"));
    p.engineered_names = s.at("engineered_names").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw CorruptError(std::string("malformed pipeline section: ") + e.what());
  }
  return p;
}

void save_pipeline(const FittedPipeline& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << pipeline_to_json(p).dump() << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

FittedPipeline load_pipeline(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::exception& e) {
    throw CorruptError("cannot parse model file '" + path + "': " + e.what());
  }
  return pipeline_from_json(j);
}

namespace {

struct FoldOutcome {
  double accuracy = 0.0;
  Confusion confusion{};
  std::optional<FittedPipeline> fitted;
};

FoldOutcome run_fold(const Dataset& data, const FoldPlan& plan, std::size_t fold, const PipelineConfig& config,
                     bool keep_model) {
  std::vector<bool> is_test(data.size(), false);
  for (std::size_t r : plan.folds[fold]) is_test.at(r) = true;
  std::vector<std::size_t> train;
  for (std::size_t r = 0; r < data.size(); ++r) {
    if (!is_test[r]) train.push_back(r);
  }
  const std::vector<std::size_t>& test = plan.folds[fold];
  FittedPipeline p = fit_pipeline(data, train, config);
  const auto predicted = p.predict(pick(data.posts, test), pick(data.engineered, test));
  FoldOutcome out;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const int truth = data.labels[test[i]];
    correct += predicted[i] == truth;
    ++out.confusion[truth == 1 ? 0 : 1][predicted[i] == 1 ? 0 : 1];
  }
  out.accuracy = test.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(test.size());
  if (keep_model) out.fitted = std::move(p);
  return out;
}

CrossValidation summarize(std::vector<FoldOutcome>& outcomes) {
  CrossValidation cv;
  for (auto& o : outcomes) {
    cv.fold_accuracies.push_back(o.accuracy);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) cv.confusion[a][b] += o.confusion[a][b];
    }
    if (o.fitted) cv.fitted.push_back(std::move(*o.fitted));
  }
  cv.mean_accuracy = cv.fold_accuracies.empty()
                         ? 0.0
                         : std::accumulate(cv.fold_accuracies.begin(), cv.fold_accuracies.end(), 0.0) /
                               static_cast<double>(cv.fold_accuracies.size());
  return cv;
}

// Runs job(i) for i in [0, n) on up to `workers` threads. The first
// exception thrown by any job is rethrown after all threads join.
template <typename Job>
void parallel_for(std::size_t n, std::size_t workers, Job&& job) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

CrossValidation cross_validate(const Dataset& data, const FoldPlan& plan, const PipelineConfig& config,
                               bool keep_models) {
  std::vector<FoldOutcome> outcomes;
  for (std::size_t f = 0; f < plan.folds.size(); ++f) outcomes.push_back(run_fold(data, plan, f, config, keep_models));
  return summarize(outcomes);
}

std::vector<PipelineConfig> GridSpec::expand() const {
  std::vector<PipelineConfig> out;
  for (VectorizerKind v : vectorizers) {
    for (NgramRange r : n_ranges) {
      for (ClassifierKind c : classifiers) {
        PipelineConfig cfg = base;
        cfg.vectorizer = v;
        cfg.n_range = r;
        cfg.classifier = c;
        if (c == ClassifierKind::svm && !c_values.empty()) {
          for (double cv : c_values) {
            cfg.svm.C = cv;
            out.push_back(cfg);
          }
        } else {
          out.push_back(cfg);
        }
      }
    }
  }
  return out;
}

json GridSpec::to_json() const {
  json j;
  j["vectorizer"] = json::array();
  for (auto v : vectorizers) j["vectorizer"].push_back(payattr::to_string(v));
  j["n_range"] = json::array();
  for (auto r : n_ranges) j["n_range"].push_back({r.low, r.high});
  j["C"] = c_values;
  j["classifier"] = json::array();
  for (auto c : classifiers) j["classifier"].push_back(payattr::to_string(c));
  const json b = base.to_json();
  for (const char* key : {"min_df", "use_engineered", "normalize_counts", "svm", "mlp", "gbdt"}) j[key] = b[key];
  return j;
}

GridSpec GridSpec::from_json(const json& j) {
  GridSpec g;
  try {
    json shared = j;
    for (const char* axis : {"vectorizer", "n_range", "C", "classifier"}) shared.erase(axis);
    g.base = PipelineConfig::from_json(shared);
    if (auto it = j.find("vectorizer"); it != j.end()) {
      g.vectorizers.clear();
      for (const auto& v : *it) g.vectorizers.push_back(parse_vectorizer(v.get<std::string>()));
    }
    if (auto it = j.find("n_range"); it != j.end()) {
      g.n_ranges.clear();
      for (const auto& r : *it) g.n_ranges.push_back(parse_range(r));
    }
    if (auto it = j.find("C"); it != j.end()) g.c_values = it->get<std::vector<double>>();
    if (auto it = j.find("classifier"); it != j.end()) {
      g.classifiers.clear();
      for (const auto& c : *it) g.classifiers.push_back(parse_classifier(c.get<std::string>()));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad grid: ") + e.what());
  }
  if (g.vectorizers.empty() || g.n_ranges.empty() || g.classifiers.empty()) {
    throw ConfigError("grid axes must be non-empty");
  }
  return g;
}

json EvalReport::to_json() const {
  json configs = json::array();
  for (const auto& r : results) {
    configs.push_back(json{{"config", r.config.to_json()},
                           {"fold_accuracies", r.cv.fold_accuracies},
                           {"mean_accuracy", r.cv.mean_accuracy}});
  }
  const auto& best_cv = results.at(best).cv;
  return json{
      {"task", payattr::to_string(task)},
      {"folds", folds},
      {"seed", seed},
      {"n_users", n_users},
      {"class_counts",
       {{class_name(task, ClassLabel::class_a), class_counts[0]},
        {class_name(task, ClassLabel::class_b), class_counts[1]}}},
      {"configs", configs},
      {"best_index", best},
      {"best_config", results.at(best).config.to_json()},
      {"best_mean_accuracy", best_cv.mean_accuracy},
      {"confusion_matrix",
       {{"labels", {class_name(task, ClassLabel::class_a), class_name(task, ClassLabel::class_b)}},
        {"rows", "true class"},
        {"columns", "predicted class"},
        {"matrix", {{best_cv.confusion[0][0], best_cv.confusion[0][1]}, {best_cv.confusion[1][0], best_cv.confusion[1][1]}}}}},
  };
}

EvalReport grid_search(const GridSpec& grid, const FoldPlan& plan, const Dataset& data, std::size_t workers) {
  const std::vector<PipelineConfig> configs = grid.expand();
  if (configs.empty()) throw ConfigError("grid is empty");
  const std::size_t k = plan.folds.size();
  std::vector<FoldOutcome> outcomes(configs.size() * k);
  parallel_for(outcomes.size(), workers, [&](std::size_t job) {
    outcomes[job] = run_fold(data, plan, job % k, configs[job / k], false);
  });

  EvalReport report;
  report.task = data.task;
  report.folds = k;
  report.seed = plan.seed;
  report.n_users = data.size();
  for (int label : data.labels) ++report.class_counts[label == 1 ? 0 : 1];
  for (std::size_t c = 0; c < configs.size(); ++c) {
    std::vector<FoldOutcome> slice(std::make_move_iterator(outcomes.begin() + static_cast<std::ptrdiff_t>(c * k)),
                                   std::make_move_iterator(outcomes.begin() + static_cast<std::ptrdiff_t>((c + 1) * k)));
    report.results.push_back({configs[c], summarize(slice)});
    if (report.results[c].cv.mean_accuracy > report.results[report.best].cv.mean_accuracy) report.best = c;
  }
  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  report.best_model = fit_pipeline(data, all, report.results[report.best].config);
  return report;
}

}  // namespace payattr
