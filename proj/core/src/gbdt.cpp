#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "payattr/error.hpp"
#include "payattr/model.hpp"
#include "payattr/random.hpp"

namespace payattr {

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double log_loss(std::span<const double> margin, std::span<const int> y) {
  double total = 0.0;
  for (std::size_t r = 0; r < margin.size(); ++r) {
    const double z = margin[r];
    const double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    total += softplus - y[r] * z;
  }
  return total / static_cast<double>(margin.size());
}

// Column-major view of the nonzero entries, each column sorted by value.
struct ColumnIndex {
  struct Entry {
    double value;
    std::uint32_t row;
  };
  std::vector<std::vector<Entry>> columns;

  explicit ColumnIndex(const SparseMatrix& x) : columns(x.cols()) {
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const auto row = x.row(r);
      for (std::size_t k = 0; k < row.size(); ++k) {
        columns[row.cols[k]].push_back({row.values[k], static_cast<std::uint32_t>(r)});
      }
    }
    for (auto& col : columns) {
      std::stable_sort(col.begin(), col.end(), [](const Entry& a, const Entry& b) { return a.value < b.value; });
    }
  }
};

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const SparseMatrix& x, const ColumnIndex& index, std::span<const double> residual,
              std::span<const double> hessian, const GbdtConfig& config)
      : x_(x), index_(index), residual_(residual), hessian_(hessian), config_(config), node_of_(x.rows(), -1) {}

  RegressionTree build(const std::vector<std::size_t>& rows) {
    RegressionTree tree;
    grow(tree, rows, 0);
    return tree;
  }

 private:
  int grow(RegressionTree& tree, const std::vector<std::size_t>& rows, std::size_t depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    double g = 0.0, h = 0.0;
    for (std::size_t r : rows) {
      g += residual_[r];
      h += hessian_[r];
    }
    tree.nodes[id].value = config_.learning_rate * g / std::max(h, 1e-12);
    if (depth >= config_.max_depth || rows.size() < 2 * config_.min_samples_leaf) return id;

    for (std::size_t r : rows) node_of_[r] = id;
    const Split split = best_split(rows, id, g);
    for (std::size_t r : rows) node_of_[r] = -1;
    if (split.feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) {
      (x_.at(r, static_cast<std::size_t>(split.feature)) <= split.threshold ? left : right).push_back(r);
    }
    tree.nodes[id].feature = split.feature;
    tree.nodes[id].threshold = split.threshold;
    const int l = grow(tree, left, depth + 1);
    const int rr = grow(tree, right, depth + 1);
    tree.nodes[id].left = l;
    tree.nodes[id].right = rr;
    return id;
  }

  // Least-squares gain on the residuals: S_L^2/n_L + S_R^2/n_R - S^2/n.
  Split best_split(const std::vector<std::size_t>& rows, int node, double total_sum) const {
    const double n = static_cast<double>(rows.size());
    const double parent = total_sum * total_sum / n;
    const std::size_t min_leaf = std::max<std::size_t>(1, config_.min_samples_leaf);
    Split best;
    best.gain = 1e-12;
    struct Item {
      double value;
      double count;
      double sum;
    };
    std::vector<Item> items;
    std::vector<Item> nz;
    for (std::size_t f = 0; f < index_.columns.size(); ++f) {
      items.clear();
      double nz_count = 0.0, nz_sum = 0.0;
      bool zero_placed = false;
      auto place_zero = [&] {
        zero_placed = true;
        const double zc = n - nz_count;
        if (zc > 0.5) items.push_back({0.0, zc, total_sum - nz_sum});
      };
      // Zero bucket counts are only known after the scan, so collect first.
      nz.clear();
      for (const auto& e : index_.columns[f]) {
        if (node_of_[e.row] != node) continue;
        nz.push_back({e.value, 1.0, residual_[e.row]});
        nz_count += 1.0;
        nz_sum += residual_[e.row];
      }
      for (const auto& it : nz) {
        if (!zero_placed && it.value > 0.0) place_zero();
        items.push_back(it);
      }
      if (!zero_placed) place_zero();

      double left_count = 0.0, left_sum = 0.0;
      for (std::size_t k = 0; k + 1 < items.size(); ++k) {
        left_count += items[k].count;
        left_sum += items[k].sum;
        if (items[k].value == items[k + 1].value) continue;
        const double right_count = n - left_count;
        if (left_count < static_cast<double>(min_leaf) || right_count < static_cast<double>(min_leaf)) continue;
        const double right_sum = total_sum - left_sum;
        const double gain =
            left_sum * left_sum / left_count + right_sum * right_sum / right_count - parent;
        if (gain > best.gain) {
          best.gain = gain;
          best.feature = static_cast<int>(f);
          best.threshold = 0.5 * (items[k].value + items[k + 1].value);
        }
      }
    }
    return best;
  }

  const SparseMatrix& x_;
  const ColumnIndex& index_;
  std::span<const double> residual_;
  std::span<const double> hessian_;
  const GbdtConfig& config_;
  std::vector<int> node_of_;
};

void scale_leaves(RegressionTree& tree, double factor) {
  for (auto& node : tree.nodes) node.value *= factor;
}

}  // namespace

double RegressionTree::predict(const SparseMatrix& x, std::size_t row) const {
  int id = 0;
  while (nodes[id].feature >= 0) {
    const auto& node = nodes[id];
    id = x.at(row, static_cast<std::size_t>(node.feature)) <= node.threshold ? node.left : node.right;
  }
  return nodes[id].value;
}

GbdtModel train_gbdt(const SparseMatrix& x, std::span<const int> y, const GbdtConfig& config) {
  if (x.rows() != y.size()) throw std::invalid_argument("model: row count does not match label count");
  double positives = 0.0;
  for (int v : y) {
    if (v != 0 && v != 1) throw std::invalid_argument("model: labels must be 0 or 1");
    positives += v;
  }
  if (positives == 0.0 || positives == static_cast<double>(y.size())) {
    throw SingleClass("training labels contain a single class");
  }
  if (config.learning_rate < 0.0 || !std::isfinite(config.learning_rate)) {
    throw std::invalid_argument("model: learning rate must be finite and non-negative");
  }
  if (!(config.subsample > 0.0 && config.subsample <= 1.0)) {
    throw std::invalid_argument("model: subsample must lie in (0, 1]");
  }

  const std::size_t n = x.rows();
  GbdtModel model;
  model.config = config;
  model.n_features = x.cols();
  const double p0 = positives / static_cast<double>(n);
  model.initial_log_odds = std::log(p0 / (1.0 - p0));

  const ColumnIndex index(x);
  std::vector<double> margin(n, model.initial_log_odds);
  std::vector<double> residual(n), hessian(n), trial(n), step(n);
  double loss = log_loss(margin, y);
  model.loss_history.push_back(loss);
  Rng rng(derive_seed(config.seed, "gbdt-subsample"));
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});

  for (std::size_t round = 0; round < config.rounds; ++round) {
    for (std::size_t r = 0; r < n; ++r) {
      const double p = sigmoid(margin[r]);
      residual[r] = y[r] - p;
      hessian[r] = p * (1.0 - p);
    }
    std::vector<std::size_t> rows = all;
    if (config.subsample < 1.0) {
      rows.clear();
      for (std::size_t r = 0; r < n; ++r) {
        if (rng.bernoulli(config.subsample)) rows.push_back(r);
      }
      if (rows.empty()) rows = all;
    }
    RegressionTree tree = TreeBuilder(x, index, residual, hessian, config).build(rows);
    for (std::size_t r = 0; r < n; ++r) step[r] = tree.predict(x, r);

    // Backtrack until the round does not raise the training loss; in the
    // limit the tree contributes nothing and the loss is unchanged.
    double factor = 1.0;
    double new_loss = loss;
    for (int attempt = 0; attempt < 40; ++attempt) {
      for (std::size_t r = 0; r < n; ++r) trial[r] = margin[r] + factor * step[r];
      new_loss = log_loss(trial, y);
      if (new_loss <= loss) break;
      factor *= 0.5;
    }
    if (new_loss > loss) {
      factor = 0.0;
      new_loss = loss;
    } else {
      margin.swap(trial);
    }
    if (factor != 1.0) scale_leaves(tree, factor);
    loss = new_loss;
    model.loss_history.push_back(loss);
    model.trees.push_back(std::move(tree));
  }
  return model;
}

std::vector<double> gbdt_decision(const GbdtModel& model, const SparseMatrix& x) {
  if (x.cols() != model.n_features) {
    throw DimensionMismatch("matrix width " + std::to_string(x.cols()) + " does not match GBDT width " +
                            std::to_string(model.n_features));
  }
  std::vector<double> out(x.rows(), model.initial_log_odds);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (const auto& tree : model.trees) out[r] += tree.predict(x, r);
  }
  return out;
}

std::vector<int> gbdt_predict(const GbdtModel& model, const SparseMatrix& x) {
  const auto d = gbdt_decision(model, x);
  std::vector<int> out(d.size());
  std::transform(d.begin(), d.end(), out.begin(), [](double v) { return v >= 0.0 ? 1 : 0; });
  return out;
}

}  // namespace payattr
