#include <fstream>
#include <sstream>

#include "payattr/error.hpp"
#include "payattr/model.hpp"

namespace payattr {

using nlohmann::json;

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::svm: return "svm";
    case ClassifierKind::mlp: return "mlp";
    case ClassifierKind::gbdt: return "gbdt";
  }
  return "svm";
}

ClassifierKind parse_classifier(std::string_view s) {
  if (s == "svm") return ClassifierKind::svm;
  if (s == "mlp") return ClassifierKind::mlp;
  if (s == "gbdt") return ClassifierKind::gbdt;
  throw ConfigError("unknown classifier '" + std::string(s) + "' (expected svm, mlp or gbdt)");
}

ClassifierKind kind_of(const Model& model) {
  return static_cast<ClassifierKind>(model.index());
}

std::vector<int> predict_class_a(const Model& model, const SparseMatrix& x) {
  if (const auto* svm = std::get_if<LinearSvmModel>(&model)) {
    auto p = svm_predict(*svm, x);
    for (int& v : p) v = v > 0 ? 1 : 0;
    return p;
  }
  if (const auto* mlp = std::get_if<MlpModel>(&model)) return mlp_predict(*mlp, x);
  return gbdt_predict(std::get<GbdtModel>(model), x);
}

namespace {

json tree_to_json(const RegressionTree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes) {
    nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.value}));
  }
  return nodes;
}

RegressionTree tree_from_json(const json& j) {
  RegressionTree tree;
  for (const auto& n : j) {
    TreeNode node;
    node.feature = n.at(0).get<int>();
    node.threshold = n.at(1).get<double>();
    node.left = n.at(2).get<int>();
    node.right = n.at(3).get<int>();
    node.value = n.at(4).get<double>();
    tree.nodes.push_back(node);
  }
  const auto size = static_cast<int>(tree.nodes.size());
  if (size == 0) throw CorruptError("empty tree");
  for (const auto& node : tree.nodes) {
    if (node.feature >= 0 && (node.left <= 0 || node.left >= size || node.right <= 0 || node.right >= size)) {
      throw CorruptError("tree child index out of range");
    }
  }
  return tree;
}

struct ToJson {
  json operator()(const LinearSvmModel& m) const {
    return json{{"kind", "svm"},
                {"hyperparameters",
                 {{"C", m.config.C}, {"tol", m.config.tol}, {"seed", m.config.seed},
                  {"max_iterations", m.config.max_iterations}}},
                {"feature_names", m.feature_names},
                {"parameters", {{"weights", m.weights}, {"bias", m.bias}, {"iterations", m.iterations}}}};
  }
  json operator()(const MlpModel& m) const {
    return json{{"kind", "mlp"},
                {"hyperparameters",
                 {{"hidden", m.config.hidden}, {"learning_rate", m.config.learning_rate},
                  {"epochs", m.config.epochs}, {"batch_size", m.config.batch_size}, {"seed", m.config.seed}}},
                {"feature_names", m.feature_names},
                {"parameters",
                 {{"inputs", m.inputs}, {"w1", m.w1}, {"b1", m.b1}, {"w2", m.w2}, {"b2", m.b2},
                  {"loss_history", m.loss_history}}}};
  }
  json operator()(const GbdtModel& m) const {
    json trees = json::array();
    for (const auto& t : m.trees) trees.push_back(tree_to_json(t));
    return json{{"kind", "gbdt"},
                {"hyperparameters",
                 {{"rounds", m.config.rounds}, {"max_depth", m.config.max_depth},
                  {"learning_rate", m.config.learning_rate}, {"seed", m.config.seed},
                  {"subsample", m.config.subsample}, {"min_samples_leaf", m.config.min_samples_leaf}}},
                {"feature_names", m.feature_names},
                {"parameters",
                 {{"n_features", m.n_features}, {"initial_log_odds", m.initial_log_odds}, {"trees", trees},
                  {"loss_history", m.loss_history}}}};
  }
};

Model parse_body(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const json& hp = j.at("hyperparameters");
  const json& p = j.at("parameters");
  const auto names = j.value("feature_names", std::vector<std::string>{});
  if (kind == "svm") {
    LinearSvmModel m;
    m.config.C = hp.at("C").get<double>();
    m.config.tol = hp.at("tol").get<double>();
    m.config.seed = hp.at("seed").get<std::uint64_t>();
    m.config.max_iterations = hp.at("max_iterations").get<std::size_t>();
    m.feature_names = names;
    m.weights = p.at("weights").get<std::vector<double>>();
    m.bias = p.at("bias").get<double>();
    m.iterations = p.at("iterations").get<std::size_t>();
    return m;
  }
  if (kind == "mlp") {
    MlpModel m;
    m.config.hidden = hp.at("hidden").get<std::size_t>();
    m.config.learning_rate = hp.at("learning_rate").get<double>();
    m.config.epochs = hp.at("epochs").get<std::size_t>();
    m.config.batch_size = hp.at("batch_size").get<std::size_t>();
    m.config.seed = hp.at("seed").get<std::uint64_t>();
    m.feature_names = names;
    m.inputs = p.at("inputs").get<std::size_t>();
    m.hidden = m.config.hidden;
    m.w1 = p.at("w1").get<std::vector<double>>();
    m.b1 = p.at("b1").get<std::vector<double>>();
    m.w2 = p.at("w2").get<std::vector<double>>();
    m.b2 = p.at("b2").get<double>();
    m.loss_history = p.at("loss_history").get<std::vector<double>>();
    if (m.w1.size() != m.hidden * m.inputs || m.b1.size() != m.hidden || m.w2.size() != m.hidden) {
      throw CorruptError("MLP parameter shapes are inconsistent");
    }
    return m;
  }
  if (kind == "gbdt") {
    GbdtModel m;
    m.config.rounds = hp.at("rounds").get<std::size_t>();
    m.config.max_depth = hp.at("max_depth").get<std::size_t>();
    m.config.learning_rate = hp.at("learning_rate").get<double>();
    m.config.seed = hp.at("seed").get<std::uint64_t>();
    m.config.subsample = hp.at("subsample").get<double>();
    m.config.min_samples_leaf = hp.at("min_samples_leaf").get<std::size_t>();
    m.feature_names = names;
    m.n_features = p.at("n_features").get<std::size_t>();
    m.initial_log_odds = p.at("initial_log_odds").get<double>();
    for (const auto& t : p.at("trees")) m.trees.push_back(tree_from_json(t));
    m.loss_history = p.at("loss_history").get<std::vector<double>>();
    return m;
  }
  throw CorruptError("unknown model kind '" + kind + "'");
}

}  // namespace

json model_to_json(const Model& model) {
  json j = std::visit(ToJson{}, model);
  j["magic"] = kModelMagic;
  j["version"] = kModelFormatVersion;
  return j;
}

Model model_from_json(const json& j) {
  if (!j.is_object() || !j.contains("magic") || j["magic"] != kModelMagic) {
    throw VersionError("not a payattr model file (bad magic)");
  }
  if (!j.contains("version") || !j["version"].is_number_integer() || j["version"].get<int>() != kModelFormatVersion) {
    throw VersionError("unsupported model format version (expected " + std::to_string(kModelFormatVersion) + ")");
  }
  try {
    return parse_body(j);
  } catch (const json::exception& e) {
    throw CorruptError(std::string("malformed model document: ") + e.what());
  }
}

void save_model(const Model& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << model_to_json(model).dump() << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

Model load_model(const std::string& path) {
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
  return model_from_json(j);
}

}  // namespace payattr
