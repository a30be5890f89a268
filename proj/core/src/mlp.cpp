#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "payattr/error.hpp"
#include "payattr/model.hpp"
#include "payattr/random.hpp"

namespace payattr {

namespace {

constexpr double kProbFloor = 1e-15;

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

void check_binary(const SparseMatrix& x, std::span<const int> y) {
  if (x.rows() != y.size()) throw std::invalid_argument("model: row count does not match label count");
  bool zero = false, one = false;
  for (int v : y) {
    if (v == 1) {
      one = true;
    } else if (v == 0) {
      zero = true;
    } else {
      throw std::invalid_argument("model: labels must be 0 or 1");
    }
  }
  if (!zero || !one) throw SingleClass("training labels contain a single class");
}

struct Forward {
  std::vector<double> pre;     // hidden pre-activations
  std::vector<double> hidden;  // ReLU outputs
  double logit = 0.0;
};

void forward(const MlpModel& m, const SparseMatrix& x, std::size_t r, Forward& f) {
  f.pre.assign(m.b1.begin(), m.b1.end());
  const auto row = x.row(r);
  for (std::size_t h = 0; h < m.hidden; ++h) {
    const double* w = m.w1.data() + h * m.inputs;
    double s = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) s += w[row.cols[k]] * row.values[k];
    f.pre[h] += s;
  }
  f.hidden.resize(m.hidden);
  f.logit = m.b2;
  for (std::size_t h = 0; h < m.hidden; ++h) {
    f.hidden[h] = f.pre[h] > 0.0 ? f.pre[h] : 0.0;
    f.logit += m.w2[h] * f.hidden[h];
  }
}

// Binary cross-entropy from a logit: softplus(z) - y z.
double bce(double logit, int y) { return softplus(logit) - y * logit; }

// Accumulates d(loss_r)/d(params) * scale into g.
void backward(const MlpModel& m, const SparseMatrix& x, std::size_t r, int y, const Forward& f, double scale,
              MlpGradients& g) {
  const double delta = (sigmoid(f.logit) - y) * scale;
  g.b2 += delta;
  const auto row = x.row(r);
  for (std::size_t h = 0; h < m.hidden; ++h) {
    g.w2[h] += delta * f.hidden[h];
    if (f.pre[h] <= 0.0) continue;
    const double dh = delta * m.w2[h];
    g.b1[h] += dh;
    double* gw = g.w1.data() + h * m.inputs;
    for (std::size_t k = 0; k < row.size(); ++k) gw[row.cols[k]] += dh * row.values[k];
  }
}

MlpGradients zero_gradients(const MlpModel& m) {
  return MlpGradients{std::vector<double>(m.w1.size(), 0.0), std::vector<double>(m.hidden, 0.0),
                      std::vector<double>(m.hidden, 0.0), 0.0};
}

struct Adam {
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::size_t step = 0;
  std::vector<double> m, v;

  explicit Adam(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

  // params[offset + i] updated from grads[i].
  void apply(std::span<double> params, std::span<const double> grads, std::size_t offset, double lr) {
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    for (std::size_t i = 0; i < params.size(); ++i) {
      double& mi = m[offset + i];
      double& vi = v[offset + i];
      mi = beta1 * mi + (1.0 - beta1) * grads[i];
      vi = beta2 * vi + (1.0 - beta2) * grads[i] * grads[i];
      params[i] -= lr * (mi / c1) / (std::sqrt(vi / c2) + eps);
    }
  }
};

}  // namespace

MlpModel init_mlp(std::size_t inputs, const MlpConfig& config) {
  if (config.hidden == 0) throw std::invalid_argument("model: MLP needs at least one hidden unit");
  MlpModel m;
  m.inputs = inputs;
  m.hidden = config.hidden;
  m.config = config;
  Rng rng(config.seed);
  const double a1 = std::sqrt(6.0 / static_cast<double>(inputs + config.hidden));
  const double a2 = std::sqrt(6.0 / static_cast<double>(config.hidden + 1));
  m.w1.resize(config.hidden * inputs);
  for (double& w : m.w1) w = rng.uniform(-a1, a1);
  m.b1.assign(config.hidden, 0.0);
  m.w2.resize(config.hidden);
  for (double& w : m.w2) w = rng.uniform(-a2, a2);
  m.b2 = 0.0;
  return m;
}

double mlp_loss(const MlpModel& model, const SparseMatrix& x, std::span<const int> y) {
  Forward f;
  double total = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    forward(model, x, r, f);
    total += bce(f.logit, y[r]);
  }
  return x.rows() > 0 ? total / static_cast<double>(x.rows()) : 0.0;
}

MlpGradients mlp_gradients(const MlpModel& model, const SparseMatrix& x, std::span<const int> y) {
  MlpGradients g = zero_gradients(model);
  Forward f;
  const double scale = 1.0 / static_cast<double>(std::max<std::size_t>(1, x.rows()));
  for (std::size_t r = 0; r < x.rows(); ++r) {
    forward(model, x, r, f);
    backward(model, x, r, y[r], f, scale, g);
  }
  return g;
}

MlpModel train_mlp(const SparseMatrix& x, std::span<const int> y, const MlpConfig& config) {
  check_binary(x, y);
  if (config.batch_size == 0) throw std::invalid_argument("model: batch size must be positive");
  MlpModel m = init_mlp(x.cols(), config);
  Rng rng(derive_seed(config.seed, "mlp-batches"));
  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});

  const std::size_t n_w1 = m.w1.size();
  Adam adam(n_w1 + 2 * m.hidden + 1);
  Forward f;
  MlpGradients g = zero_gradients(m);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::fill(g.w1.begin(), g.w1.end(), 0.0);
      std::fill(g.b1.begin(), g.b1.end(), 0.0);
      std::fill(g.w2.begin(), g.w2.end(), 0.0);
      g.b2 = 0.0;
      const double scale = 1.0 / static_cast<double>(end - start);
      for (std::size_t b = start; b < end; ++b) {
        const std::size_t r = order[b];
        forward(m, x, r, f);
        epoch_loss += bce(f.logit, y[r]);
        backward(m, x, r, y[r], f, scale, g);
      }
      ++adam.step;
      adam.apply(m.w1, g.w1, 0, config.learning_rate);
      adam.apply(m.b1, g.b1, n_w1, config.learning_rate);
      adam.apply(m.w2, g.w2, n_w1 + m.hidden, config.learning_rate);
      adam.apply(std::span<double>(&m.b2, 1), std::span<const double>(&g.b2, 1), n_w1 + 2 * m.hidden,
                 config.learning_rate);
    }
    epoch_loss /= static_cast<double>(order.size());
    if (!std::isfinite(epoch_loss)) {
      throw NonFinite("MLP loss became non-finite at epoch " + std::to_string(epoch) +
                      "; lower the learning rate");
    }
    m.loss_history.push_back(epoch_loss);
  }
  return m;
}

std::vector<double> mlp_predict_proba(const MlpModel& model, const SparseMatrix& x) {
  if (x.cols() != model.inputs) {
    throw DimensionMismatch("matrix width " + std::to_string(x.cols()) + " does not match MLP input width " +
                            std::to_string(model.inputs));
  }
  std::vector<double> out(x.rows());
  Forward f;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    forward(model, x, r, f);
    // keep the open interval even where the logistic saturates in double
    out[r] = std::clamp(sigmoid(f.logit), kProbFloor, 1.0 - kProbFloor);
  }
  return out;
}

std::vector<int> mlp_predict(const MlpModel& model, const SparseMatrix& x) {
  const auto p = mlp_predict_proba(model, x);
  std::vector<int> out(p.size());
  std::transform(p.begin(), p.end(), out.begin(), [](double v) { return v >= 0.5 ? 1 : 0; });
  return out;
}

}  // namespace payattr
