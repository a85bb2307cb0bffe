#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mixbag/bag.hpp"
#include "mixbag/data.hpp"
#include "mixbag/matrix.hpp"
#include "mixbag/mix.hpp"

namespace mixbag {

// log argument clamp; the gradient is zeroed once the estimate hits it.
constexpr double kLogEps = 1e-12;

// Per-instance class probabilities of one bag plus their column mean, the
// bag-level proportion estimate.
struct BagPrediction {
  Matrix instance_probs;      // |B| x C, rows on the simplex
  ProportionVector bag_estimate;  // column means
};

struct LossValueWithGrad {
  double value = 0.0;
  Matrix grad;  // d value / d instance_probs, |B| x C
};

// Column means of the per-instance probabilities. Rows must lie on the
// simplex within 1e-6.
inline ProportionVector bag_estimate(const Matrix& instance_probs) {
  if (instance_probs.rows == 0) throw std::invalid_argument("bag_estimate: empty bag");
  const std::size_t n = instance_probs.rows, C = instance_probs.cols;
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t c = 0; c < C; ++c) s += instance_probs(j, c);
    if (std::fabs(s - 1.0) > 1e-6)
      throw std::invalid_argument("bag_estimate: row off the probability simplex");
  }
  std::vector<double> mean(C, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t c = 0; c < C; ++c) mean[c] += instance_probs(j, c);
  for (std::size_t c = 0; c < C; ++c) mean[c] /= static_cast<double>(n);
  return ProportionVector(mean);
}

inline BagPrediction make_bag_prediction(Matrix instance_probs) {
  ProportionVector est = bag_estimate(instance_probs);
  return BagPrediction{std::move(instance_probs), std::move(est)};
}

// Shared core of the proportion and CI losses: cross-entropy between target
// and the bag estimate with a per-class 0/1 gate,
//   value = - sum_c gate_c * target_c * log(max(phat_c, eps)),
// with the 0 * log(.) = 0 convention and the gate held constant under
// differentiation. The gradient w.r.t. every instance's class-c probability
// is -gate_c * target_c / (|B| * phat_c), zeroed at the clamp.
inline LossValueWithGrad gated_proportion_loss(const BagPrediction& pred,
                                               const ProportionVector& target,
                                               const std::vector<int>& gate) {
  const std::size_t n = pred.instance_probs.rows, C = pred.instance_probs.cols;
  if (target.size() != C) throw std::invalid_argument("proportion_loss: class count mismatch");
  if (gate.size() != C) throw std::invalid_argument("proportion_loss: gate size mismatch");

  LossValueWithGrad out;
  out.grad = Matrix(n, C, 0.0);
  for (std::size_t c = 0; c < C; ++c) {
    if (gate[c] == 0 || target[c] == 0.0) continue;
    const double phat = pred.bag_estimate[c];
    const double clamped = std::max(phat, kLogEps);
    out.value -= target[c] * std::log(clamped);
    if (phat > kLogEps) {
      const double g = -target[c] / (static_cast<double>(n) * clamped);
      for (std::size_t j = 0; j < n; ++j) out.grad(j, c) = g;
    }
  }
  return out;
}

// Bag-level cross-entropy between the given proportion and the estimate.
inline LossValueWithGrad proportion_loss(const BagPrediction& pred,
                                         const ProportionVector& target) {
  return gated_proportion_loss(pred, target, std::vector<int>(target.size(), 1));
}

// Eq-style indicator per class: 0 when the estimate falls inside the
// confidence interval (term ignored), 1 otherwise (term active).
inline std::vector<int> ci_gate(const BagPrediction& pred, const MixedBagLabel& label) {
  const std::vector<std::pair<double, double>> bounds = ci_bounds(label);
  std::vector<int> gate(bounds.size());
  for (std::size_t c = 0; c < bounds.size(); ++c) {
    const double phat = pred.bag_estimate[c];
    gate[c] = (phat >= bounds[c].first && phat <= bounds[c].second) ? 0 : 1;
  }
  return gate;
}

// Proportion loss against the expected mixed proportion with per-class terms
// gated off while the estimate sits inside the confidence interval.
inline LossValueWithGrad ci_loss(const BagPrediction& pred, const MixedBagLabel& label) {
  return gated_proportion_loss(pred, label.expected, ci_gate(pred, label));
}

}  // namespace mixbag
