#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "payattr/sparse.hpp"

namespace payattr {

// Label conventions: the SVM takes +1/-1, the MLP and GBDT take 1/0. In all
// three, the positive label is class_a.

// ---------------------------------------------------------------- linear SVM

struct SvmConfig {
  double C = 1.0;
  double tol = 1e-3;  // maximal KKT violation at termination
  std::uint64_t seed = 0;
  std::size_t max_iterations = 10'000'000;
  std::size_t cache_mb = 256;  // kernel column cache
};

struct LinearSvmModel {
  std::vector<double> weights;
  double bias = 0.0;
  SvmConfig config;
  std::vector<std::string> feature_names;
  std::size_t iterations = 0;
};

/// Minimizes 1/2 |w|^2 + C sum_i max(0, 1 - y_i (w.x_i + b)) with an
/// unregularized bias, by SMO on the dual with second-order working-set
/// selection. The solver is deterministic; `seed` is carried for the model
/// record. Throws SingleClass, NonFinite, or std::invalid_argument for bad
/// shapes or labels outside {-1, +1}.
LinearSvmModel train_linear_svm(const SparseMatrix& x, std::span<const int> y, const SvmConfig& config = {});

/// X w + b, one value per row. Throws DimensionMismatch when widths differ.
std::vector<double> svm_decision(const LinearSvmModel& model, const SparseMatrix& x);
/// sign(decision), with 0 mapped to +1.
std::vector<int> svm_predict(const LinearSvmModel& model, const SparseMatrix& x);

double svm_primal_objective(const LinearSvmModel& model, const SparseMatrix& x, std::span<const int> y);

struct Coefficient {
  std::string feature;
  double weight = 0.0;

  bool operator==(const Coefficient&) const = default;
};

struct CoefficientRanking {
  std::vector<Coefficient> positive;  // strongest class_a indicators
  std::vector<Coefficient> negative;  // strongest class_b indicators
};

/// Up to k largest positive and k most negative weights, ordered by
/// |weight| descending with ties broken by feature name. Zero weights may
/// fill either list once its sign runs out, so an all-zero model returns k
/// name-sorted rows per side. k is clipped to the model width.
CoefficientRanking top_coefficients(const LinearSvmModel& model, std::size_t k);

// ---------------------------------------------------------------------- MLP

struct MlpConfig {
  std::size_t hidden = 64;
  double learning_rate = 0.01;
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
};

/// One ReLU hidden layer, logistic output.
struct MlpModel {
  std::size_t inputs = 0;
  std::size_t hidden = 0;
  std::vector<double> w1;  // hidden x inputs, row-major
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // hidden
  double b2 = 0.0;
  MlpConfig config;
  std::vector<std::string> feature_names;
  std::vector<double> loss_history;  // mean mini-batch loss over each epoch
};

/// Glorot-uniform initial parameters drawn from `config.seed`.
MlpModel init_mlp(std::size_t inputs, const MlpConfig& config);

/// Mini-batch Adam on mean binary cross-entropy. Throws SingleClass, or
/// NonFinite if the loss diverges.
MlpModel train_mlp(const SparseMatrix& x, std::span<const int> y, const MlpConfig& config = {});

std::vector<double> mlp_predict_proba(const MlpModel& model, const SparseMatrix& x);
std::vector<int> mlp_predict(const MlpModel& model, const SparseMatrix& x);

/// Mean binary cross-entropy over all rows.
double mlp_loss(const MlpModel& model, const SparseMatrix& x, std::span<const int> y);

struct MlpGradients {
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  double b2 = 0.0;
};

/// Backpropagated gradient of mlp_loss with respect to every parameter.
MlpGradients mlp_gradients(const MlpModel& model, const SparseMatrix& x, std::span<const int> y);

// --------------------------------------------------------------------- GBDT

struct GbdtConfig {
  std::size_t rounds = 200;
  std::size_t max_depth = 3;
  double learning_rate = 0.1;
  std::uint64_t seed = 0;
  double subsample = 1.0;  // row fraction per round, drawn from seed
  std::size_t min_samples_leaf = 1;
};

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output, already scaled by the learning rate
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(const SparseMatrix& x, std::size_t row) const;
};

struct GbdtModel {
  double initial_log_odds = 0.0;
  std::vector<RegressionTree> trees;
  GbdtConfig config;
  std::size_t n_features = 0;
  std::vector<std::string> feature_names;
  std::vector<double> loss_history;  // initial loss, then one entry per round
};

/// Stagewise least-squares trees on the logistic-loss residual y - p, with
/// Newton leaf values. A round whose step would raise the training loss is
/// halved until it does not, so loss_history is non-increasing.
GbdtModel train_gbdt(const SparseMatrix& x, std::span<const int> y, const GbdtConfig& config = {});

/// Raw margin (log-odds).
std::vector<double> gbdt_decision(const GbdtModel& model, const SparseMatrix& x);
std::vector<int> gbdt_predict(const GbdtModel& model, const SparseMatrix& x);

// ------------------------------------------------------------ any classifier

enum class ClassifierKind { svm, mlp, gbdt };

std::string_view to_string(ClassifierKind kind);
ClassifierKind parse_classifier(std::string_view s);

using Model = std::variant<LinearSvmModel, MlpModel, GbdtModel>;

ClassifierKind kind_of(const Model& model);

/// 1 for class_a, 0 for class_b, whatever the classifier.
std::vector<int> predict_class_a(const Model& model, const SparseMatrix& x);

inline constexpr std::string_view kModelMagic = "payattr-model";
inline constexpr int kModelFormatVersion = 1;

/// JSON container: magic, version, kind, hyperparameters, feature names and
/// parameters. Doubles round-trip exactly.
nlohmann::json model_to_json(const Model& model);
/// Throws VersionError on a wrong magic or version, CorruptError on a
/// structurally invalid document.
Model model_from_json(const nlohmann::json& j);

void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace payattr
