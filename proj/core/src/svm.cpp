#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <stdexcept>

#include "payattr/error.hpp"
#include "payattr/model.hpp"

namespace payattr {

namespace {

constexpr double kTau = 1e-12;

void check_inputs(const SparseMatrix& x, std::span<const int> y) {
  if (x.rows() != y.size()) throw std::invalid_argument("model: row count does not match label count");
  bool pos = false, neg = false;
  for (int label : y) {
    if (label == 1) {
      pos = true;
    } else if (label == -1) {
      neg = true;
    } else {
      throw std::invalid_argument("model: SVM labels must be +1 or -1");
    }
  }
  if (!pos || !neg) throw SingleClass("training labels contain a single class");
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (double v : x.row(r).values) {
      if (!std::isfinite(v)) throw NonFinite("non-finite feature value in row " + std::to_string(r));
    }
  }
}

// Linear-kernel columns K(:, i) = X x_i, computed on demand and kept in a
// bounded FIFO cache.
class KernelColumns {
 public:
  KernelColumns(const SparseMatrix& x, std::size_t cache_mb)
      : x_(x), columns_(x.rows()), scratch_(x.cols(), 0.0) {
    const std::size_t bytes_per_column = std::max<std::size_t>(1, x.rows() * sizeof(double));
    capacity_ = std::max<std::size_t>(2, cache_mb * 1024 * 1024 / bytes_per_column);
  }

  const std::vector<double>& column(std::size_t i) {
    if (!columns_[i].empty() || x_.rows() == 0) return columns_[i];
    if (order_.size() >= capacity_) {
      columns_[order_.front()] = {};
      order_.pop_front();
    }
    const auto row = x_.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) scratch_[row.cols[k]] = row.values[k];
    std::vector<double> col(x_.rows());
    for (std::size_t t = 0; t < x_.rows(); ++t) col[t] = x_.dot(t, scratch_);
    for (std::size_t k = 0; k < row.size(); ++k) scratch_[row.cols[k]] = 0.0;
    order_.push_back(i);
    columns_[i] = std::move(col);
    return columns_[i];
  }

  // Keeps i's column resident while j's is computed.
  std::vector<double> copy_of(std::size_t i) { return column(i); }

 private:
  const SparseMatrix& x_;
  std::vector<std::vector<double>> columns_;
  std::list<std::size_t> order_;
  std::vector<double> scratch_;
  std::size_t capacity_ = 2;
};

}  // namespace

LinearSvmModel train_linear_svm(const SparseMatrix& x, std::span<const int> y, const SvmConfig& config) {
  check_inputs(x, y);
  if (!(config.C > 0.0) || !std::isfinite(config.C)) throw std::invalid_argument("model: C must be positive");
  const std::size_t n = x.rows();
  const double c = config.C;

  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // (Q alpha)_t - 1
  std::vector<double> diag(n);
  for (std::size_t t = 0; t < n; ++t) diag[t] = x.dot(t, x, t);
  KernelColumns kernel(x, config.cache_mb);

  const auto in_up = [&](std::size_t t) { return y[t] == 1 ? alpha[t] < c : alpha[t] > 0.0; };
  const auto in_low = [&](std::size_t t) { return y[t] == 1 ? alpha[t] > 0.0 : alpha[t] < c; };

  std::size_t iter = 0;
  for (; iter < config.max_iterations; ++iter) {
    // Working set: i maximizes -y G over I_up, j minimizes the second-order
    // model of the objective decrease over I_low.
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (in_up(t) && -y[t] * grad[t] > gmax) {
        gmax = -y[t] * grad[t];
        i = t;
      }
    }
    if (i == n) break;
    const std::vector<double> ki = kernel.copy_of(i);
    double gmin = std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double v = -y[t] * grad[t];
      gmin = std::min(gmin, v);
      const double b = gmax - v;
      if (b > 0.0) {
        double a = diag[i] + diag[t] - 2.0 * ki[t];
        if (a <= 0.0) a = kTau;
        const double score = -(b * b) / a;
        if (score < best) {
          best = score;
          j = t;
        }
      }
    }
    if (j == n || gmax - gmin < config.tol) break;

    const std::vector<double>& kj = kernel.column(j);
    const double yi = y[i], yj = y[j];
    const double qij = yi * yj * ki[j];
    const double old_i = alpha[i], old_j = alpha[j];
    if (y[i] != y[j]) {
      double quad = diag[i] + diag[j] + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      double quad = diag[i] + diag[j] - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }
    const double di = (alpha[i] - old_i) * yi;
    const double dj = (alpha[j] - old_j) * yj;
    for (std::size_t t = 0; t < n; ++t) grad[t] += y[t] * (di * ki[t] + dj * kj[t]);
  }

  LinearSvmModel model;
  model.config = config;
  model.iterations = iter;
  model.weights.assign(x.cols(), 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] == 0.0) continue;
    const auto row = x.row(t);
    for (std::size_t k = 0; k < row.size(); ++k) model.weights[row.cols[k]] += alpha[t] * y[t] * row.values[k];
  }

  // rho as in LIBSVM: mean of y G over free vectors, else midpoint of the
  // feasible interval. decision = w.x - rho.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= c) {
      if (y[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0.0) {
      if (y[t] == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++free_count;
      free_sum += yg;
    }
  }
  const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : (ub + lb) / 2.0;
  model.bias = -rho;
  return model;
}

std::vector<double> svm_decision(const LinearSvmModel& model, const SparseMatrix& x) {
  if (x.cols() != model.weights.size()) {
    throw DimensionMismatch("matrix width " + std::to_string(x.cols()) + " does not match model width " +
                            std::to_string(model.weights.size()));
  }
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = x.dot(r, model.weights) + model.bias;
  return out;
}

std::vector<int> svm_predict(const LinearSvmModel& model, const SparseMatrix& x) {
  const auto d = svm_decision(model, x);
  std::vector<int> out(d.size());
  std::transform(d.begin(), d.end(), out.begin(), [](double v) { return v >= 0.0 ? 1 : -1; });
  return out;
}

double svm_primal_objective(const LinearSvmModel& model, const SparseMatrix& x, std::span<const int> y) {
  double reg = 0.0;
  for (double w : model.weights) reg += w * w;
  const auto d = svm_decision(model, x);
  double hinge = 0.0;
  for (std::size_t r = 0; r < d.size(); ++r) hinge += std::max(0.0, 1.0 - y[r] * d[r]);
  return 0.5 * reg + model.config.C * hinge;
}

CoefficientRanking top_coefficients(const LinearSvmModel& model, std::size_t k) {
  const std::size_t d = model.weights.size();
  k = std::min(k, d);
  const auto name = [&](std::size_t i) {
    return i < model.feature_names.size() ? model.feature_names[i] : "f" + std::to_string(i);
  };
  // Positive side: descending weight; negative side: ascending weight. Ties
  // by name, so zero weights come out name-sorted.
  auto ranked = [&](bool positive) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < d; ++i) {
      if (positive ? model.weights[i] >= 0.0 : model.weights[i] <= 0.0) idx.push_back(i);
    }
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      const double wa = positive ? model.weights[a] : -model.weights[a];
      const double wb = positive ? model.weights[b] : -model.weights[b];
      if (wa != wb) return wa > wb;
      return name(a) < name(b);
    });
    std::vector<Coefficient> out;
    for (std::size_t r = 0; r < std::min(k, idx.size()); ++r) out.push_back({name(idx[r]), model.weights[idx[r]]});
    return out;
  };
  return {ranked(true), ranked(false)};
}

}  // namespace payattr
