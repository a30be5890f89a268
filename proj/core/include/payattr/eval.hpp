#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "payattr/corpus.hpp"
#include "payattr/features.hpp"
#include "payattr/label.hpp"
#include "payattr/model.hpp"
#include "payattr/vectorize.hpp"

namespace payattr {

/// Row-aligned per-user inputs for the classifiers. labels[i] is 1 for
/// class_a and 0 for class_b.
struct Dataset {
  Task task = Task::gender;
  std::vector<std::string> user_ids;
  std::vector<UserPosts> posts;
  std::vector<std::vector<double>> engineered;
  std::vector<std::string> engineered_names;
  std::vector<int> labels;

  std::size_t size() const { return user_ids.size(); }
};

/// Tokenizes every labeled user's notes and computes engineered features.
/// Users missing from the corpus are skipped.
Dataset build_dataset(const Corpus& corpus, const std::vector<LabeledUser>& labeled,
                      const FeatureOptions& features = {}, const Lexicons& lexicons = default_lexicons());

/// Downsamples the majority class uniformly without replacement to the
/// minority size. Order of the output follows the input. Throws SingleClass.
std::vector<LabeledUser> balance_classes(const std::vector<LabeledUser>& labeled, std::uint64_t seed);

struct FoldPlan {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::size_t>> folds;  // row indices, ascending
};

/// Shuffles each class with the seed and deals it round-robin, continuing
/// where the previous class stopped, so per-fold class counts are within
/// one of proportional and fold sizes within one of each other. Throws
/// TooFewSamples when k < 2 or either class has fewer than k rows.
FoldPlan stratified_kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed);

enum class VectorizerKind { count, tfidf };

std::string_view to_string(VectorizerKind kind);
VectorizerKind parse_vectorizer(std::string_view s);

struct PipelineConfig {
  VectorizerKind vectorizer = VectorizerKind::tfidf;
  NgramRange n_range{1, 2};
  std::size_t min_df = 2;
  bool use_engineered = true;
  bool normalize_counts = false;  // L2-normalize count rows (ablation)
  ClassifierKind classifier = ClassifierKind::svm;
  SvmConfig svm;
  MlpConfig mlp;
  GbdtConfig gbdt;

  nlohmann::json to_json() const;
  /// Fields absent from `j` keep the values of `base`.
  static PipelineConfig from_json(const nlohmann::json& j, const PipelineConfig& base);
  static PipelineConfig from_json(const nlohmann::json& j);
};

/// Every stateful component fitted on training rows only: vocabulary,
/// scaler and classifier.
struct FittedPipeline {
  Task task = Task::gender;
  PipelineConfig config;
  Vocabulary vocabulary;
  ScalerStats scaler;
  std::vector<std::string> engineered_names;
  Model model;

  std::vector<std::string> feature_names() const;
  SparseMatrix transform(std::span<const UserPosts> posts, std::span<const std::vector<double>> engineered) const;
  /// 1 for class_a, 0 for class_b.
  std::vector<int> predict(std::span<const UserPosts> posts, std::span<const std::vector<double>> engineered) const;
};

FittedPipeline fit_pipeline(const Dataset& data, std::span<const std::size_t> rows, const PipelineConfig& config);

nlohmann::json pipeline_to_json(const FittedPipeline& p);
FittedPipeline pipeline_from_json(const nlohmann::json& j);
void save_pipeline(const FittedPipeline& p, const std::string& path);
FittedPipeline load_pipeline(const std::string& path);

/// Rows are the true class (class_a, class_b), columns the prediction.
using Confusion = std::array<std::array<std::size_t, 2>, 2>;

struct CrossValidation {
  std::vector<double> fold_accuracies;
  double mean_accuracy = 0.0;
  Confusion confusion{};
  std::vector<FittedPipeline> fitted;  // filled when keep_models is set
};

CrossValidation cross_validate(const Dataset& data, const FoldPlan& plan, const PipelineConfig& config,
                               bool keep_models = false);

/// Hyperparameter grid. Expansion order: vectorizer, then n-gram range,
/// then classifier, then C (C only varies for the SVM).
struct GridSpec {
  std::vector<VectorizerKind> vectorizers{VectorizerKind::count, VectorizerKind::tfidf};
  std::vector<NgramRange> n_ranges{{1, 1}, {1, 2}};
  std::vector<double> c_values{0.01, 0.1, 1.0, 10.0, 100.0};
  std::vector<ClassifierKind> classifiers{ClassifierKind::svm, ClassifierKind::mlp, ClassifierKind::gbdt};
  PipelineConfig base;

  std::vector<PipelineConfig> expand() const;

  nlohmann::json to_json() const;
  /// Keys: vectorizer, n_range, C, classifier (arrays), plus optional
  /// min_df, use_engineered, normalize_counts and per-classifier override
  /// objects "svm", "mlp", "gbdt".
  static GridSpec from_json(const nlohmann::json& j);
};

struct ConfigResult {
  PipelineConfig config;
  CrossValidation cv;
};

struct EvalReport {
  Task task = Task::gender;
  std::size_t folds = 0;
  std::uint64_t seed = 0;
  std::size_t n_users = 0;
  std::array<std::size_t, 2> class_counts{};
  std::vector<ConfigResult> results;
  std::size_t best = 0;  // argmax mean accuracy; first in grid order on ties
  FittedPipeline best_model;  // best config refit on all rows

  nlohmann::json to_json() const;
};

/// Cross-validates every grid point, then refits the best on all rows.
/// Jobs run on `workers` threads; results do not depend on the count.
EvalReport grid_search(const GridSpec& grid, const FoldPlan& plan, const Dataset& data, std::size_t workers = 1);

}  // namespace payattr
