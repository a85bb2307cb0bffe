#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixbag/matrix.hpp"
#include "mixbag/rng.hpp"

namespace mixbag {

enum class Architecture { kLinear, kMlp };

// Softmax classifier with all parameters in one flat vector. Layout:
//   linear: [ W (D x C) | b (C) ]
//   mlp:    [ W1 (D x H) | b1 (H) | W2 (H x C) | b2 (C) ]  (ReLU hidden)
// Matrices are row-major (input index major).
struct ModelParams {
  Architecture arch = Architecture::kLinear;
  int feature_dim = 0;
  int num_classes = 0;
  int hidden = 0;  // 0 for linear
  std::vector<double> theta;

  std::size_t w1_size() const {
    return static_cast<std::size_t>(feature_dim) * (arch == Architecture::kLinear ? num_classes : hidden);
  }
  std::size_t b1_size() const { return arch == Architecture::kLinear ? num_classes : hidden; }
  std::size_t w2_size() const {
    return arch == Architecture::kLinear ? 0 : static_cast<std::size_t>(hidden) * num_classes;
  }
  std::size_t b2_size() const { return arch == Architecture::kLinear ? 0 : num_classes; }
  std::size_t param_count() const { return w1_size() + b1_size() + w2_size() + b2_size(); }

  const double* w1() const { return theta.data(); }
  const double* b1() const { return theta.data() + w1_size(); }
  const double* w2() const { return theta.data() + w1_size() + b1_size(); }
  const double* b2() const { return theta.data() + w1_size() + b1_size() + w2_size(); }
};

// Glorot-uniform weights, zero biases.
inline ModelParams init_params(Architecture arch, int feature_dim, int num_classes, int hidden,
                               Rng& rng) {
  if (feature_dim < 1 || num_classes < 2)
    throw std::invalid_argument("init_params: need feature_dim >= 1 and num_classes >= 2");
  if (arch == Architecture::kMlp && hidden < 1)
    throw std::invalid_argument("init_params: mlp needs hidden >= 1");
  ModelParams p;
  p.arch = arch;
  p.feature_dim = feature_dim;
  p.num_classes = num_classes;
  p.hidden = arch == Architecture::kMlp ? hidden : 0;
  p.theta.assign(p.param_count(), 0.0);
  const int out1 = arch == Architecture::kLinear ? num_classes : hidden;
  const double lim1 = std::sqrt(6.0 / (feature_dim + out1));
  for (std::size_t i = 0; i < p.w1_size(); ++i) p.theta[i] = rng.uniform(-lim1, lim1);
  if (arch == Architecture::kMlp) {
    const double lim2 = std::sqrt(6.0 / (hidden + num_classes));
    double* w2 = p.theta.data() + p.w1_size() + p.b1_size();
    for (std::size_t i = 0; i < p.w2_size(); ++i) w2[i] = rng.uniform(-lim2, lim2);
  }
  return p;
}

namespace detail {

inline void softmax_rows(Matrix& logits) {
  for (std::size_t j = 0; j < logits.rows; ++j) {
    double* row = logits.row(j);
    double mx = row[0];
    for (std::size_t c = 1; c < logits.cols; ++c) mx = std::max(mx, row[c]);
    double sum = 0.0;
    for (std::size_t c = 0; c < logits.cols; ++c) {
      row[c] = std::exp(row[c] - mx);
      sum += row[c];
    }
    for (std::size_t c = 0; c < logits.cols; ++c) row[c] /= sum;
  }
}

// Pre-activation forward pass; hidden (post-ReLU) is filled for the mlp.
inline Matrix forward_logits(const ModelParams& p, const Matrix& features, Matrix* hidden_out) {
  const std::size_t n = features.rows;
  const std::size_t D = p.feature_dim, C = p.num_classes;
  if (features.cols != D) throw std::invalid_argument("forward: feature dimension mismatch");
  for (double v : features.data)
    if (std::isnan(v)) throw std::invalid_argument("forward: NaN in features");

  if (p.arch == Architecture::kLinear) {
    Matrix logits(n, C);
    for (std::size_t j = 0; j < n; ++j) {
      const double* x = features.row(j);
      double* out = logits.row(j);
      for (std::size_t c = 0; c < C; ++c) out[c] = p.b1()[c];
      for (std::size_t d = 0; d < D; ++d) {
        const double xd = x[d];
        const double* wrow = p.w1() + d * C;
        for (std::size_t c = 0; c < C; ++c) out[c] += xd * wrow[c];
      }
    }
    return logits;
  }

  const std::size_t H = p.hidden;
  Matrix hidden(n, H);
  for (std::size_t j = 0; j < n; ++j) {
    const double* x = features.row(j);
    double* h = hidden.row(j);
    for (std::size_t k = 0; k < H; ++k) h[k] = p.b1()[k];
    for (std::size_t d = 0; d < D; ++d) {
      const double xd = x[d];
      const double* wrow = p.w1() + d * H;
      for (std::size_t k = 0; k < H; ++k) h[k] += xd * wrow[k];
    }
    for (std::size_t k = 0; k < H; ++k) h[k] = h[k] > 0.0 ? h[k] : 0.0;
  }
  Matrix logits(n, C);
  for (std::size_t j = 0; j < n; ++j) {
    const double* h = hidden.row(j);
    double* out = logits.row(j);
    for (std::size_t c = 0; c < C; ++c) out[c] = p.b2()[c];
    for (std::size_t k = 0; k < H; ++k) {
      const double hk = h[k];
      const double* wrow = p.w2() + k * C;
      for (std::size_t c = 0; c < C; ++c) out[c] += hk * wrow[c];
    }
  }
  if (hidden_out) *hidden_out = std::move(hidden);
  return logits;
}

}  // namespace detail

// Class probabilities for a batch of feature rows (softmax rows, stabilized
// by max subtraction).
inline Matrix forward(const ModelParams& p, const Matrix& features) {
  Matrix logits = detail::forward_logits(p, features, nullptr);
  detail::softmax_rows(logits);
  return logits;
}

// Accumulates d loss / d theta into grad (scaled), given the loss gradient
// w.r.t. the output probabilities. Exact reverse mode through the softmax
// (and ReLU): with row probabilities s and upstream g,
//   d logit_c = s_c * (g_c - sum_k g_k s_k).
inline void backward_accumulate(const ModelParams& p, const Matrix& features,
                                const Matrix& dprobs, std::vector<double>& grad,
                                double scale = 1.0) {
  const std::size_t n = features.rows, D = p.feature_dim, C = p.num_classes;
  if (dprobs.rows != n || dprobs.cols != C)
    throw std::invalid_argument("backward: gradient shape mismatch");
  if (grad.size() != p.param_count())
    throw std::invalid_argument("backward: parameter gradient size mismatch");

  Matrix hidden;
  Matrix probs = detail::forward_logits(p, features, &hidden);
  detail::softmax_rows(probs);

  Matrix dlogits(n, C);
  for (std::size_t j = 0; j < n; ++j) {
    const double* s = probs.row(j);
    const double* g = dprobs.row(j);
    double dot = 0.0;
    for (std::size_t c = 0; c < C; ++c) dot += g[c] * s[c];
    double* dl = dlogits.row(j);
    for (std::size_t c = 0; c < C; ++c) dl[c] = scale * s[c] * (g[c] - dot);
  }

  if (p.arch == Architecture::kLinear) {
    double* dw = grad.data();
    double* db = grad.data() + p.w1_size();
    for (std::size_t j = 0; j < n; ++j) {
      const double* x = features.row(j);
      const double* dl = dlogits.row(j);
      for (std::size_t d = 0; d < D; ++d) {
        double* dwrow = dw + d * C;
        for (std::size_t c = 0; c < C; ++c) dwrow[c] += x[d] * dl[c];
      }
      for (std::size_t c = 0; c < C; ++c) db[c] += dl[c];
    }
    return;
  }

  const std::size_t H = p.hidden;
  double* dw1 = grad.data();
  double* db1 = grad.data() + p.w1_size();
  double* dw2 = grad.data() + p.w1_size() + p.b1_size();
  double* db2 = grad.data() + p.w1_size() + p.b1_size() + p.w2_size();
  std::vector<double> dh(H);
  for (std::size_t j = 0; j < n; ++j) {
    const double* x = features.row(j);
    const double* h = hidden.row(j);
    const double* dl = dlogits.row(j);
    for (std::size_t k = 0; k < H; ++k) {
      double* dwrow = dw2 + k * C;
      double acc = 0.0;
      const double* wrow = p.w2() + k * C;
      for (std::size_t c = 0; c < C; ++c) {
        dwrow[c] += h[k] * dl[c];
        acc += wrow[c] * dl[c];
      }
      dh[k] = h[k] > 0.0 ? acc : 0.0;  // ReLU: zero where the unit was off
    }
    for (std::size_t c = 0; c < C; ++c) db2[c] += dl[c];
    for (std::size_t d = 0; d < D; ++d) {
      double* dwrow = dw1 + d * H;
      for (std::size_t k = 0; k < H; ++k) dwrow[k] += x[d] * dh[k];
    }
    for (std::size_t k = 0; k < H; ++k) db1[k] += dh[k];
  }
}

inline std::vector<double> backward(const ModelParams& p, const Matrix& features,
                                    const Matrix& dprobs) {
  std::vector<double> grad(p.param_count(), 0.0);
  backward_accumulate(p, features, dprobs, grad, 1.0);
  return grad;
}

// Adam with bias correction.
struct AdamState {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<double> m, v;

  explicit AdamState(std::size_t param_count, double learning_rate = 3e-4)
      : lr(learning_rate), m(param_count, 0.0), v(param_count, 0.0) {}
};

inline void adam_step(ModelParams& params, const std::vector<double>& grad, AdamState& st) {
  if (grad.size() != params.theta.size() || st.m.size() != grad.size())
    throw std::invalid_argument("adam_step: size mismatch");
  ++st.step;
  const double c1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step));
  const double c2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step));
  for (std::size_t i = 0; i < grad.size(); ++i) {
    st.m[i] = st.beta1 * st.m[i] + (1.0 - st.beta1) * grad[i];
    st.v[i] = st.beta2 * st.v[i] + (1.0 - st.beta2) * grad[i] * grad[i];
    const double mhat = st.m[i] / c1;
    const double vhat = st.v[i] / c2;
    params.theta[i] -= st.lr * mhat / (std::sqrt(vhat) + st.eps);
  }
}

}  // namespace mixbag
