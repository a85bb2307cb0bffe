#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mixbag/bag.hpp"
#include "mixbag/rng.hpp"

namespace mixbag {

// How the mixing ratio gamma is drawn: uniform on [0,1], Gaussian clamped to
// [0,1], or the constant 0.5.
struct GammaStrategy {
  enum class Kind { kUniform, kGauss, kHalf };
  Kind kind = Kind::kUniform;
  double gauss_mean = 0.5;
  double gauss_std = 0.25;

  static GammaStrategy uniform() { return {Kind::kUniform, 0.0, 0.0}; }
  static GammaStrategy gauss(double mean = 0.5, double std = 0.25) {
    if (!(std > 0.0)) throw std::invalid_argument("GammaStrategy: gauss std must be > 0");
    return {Kind::kGauss, mean, std};
  }
  static GammaStrategy half() { return {Kind::kHalf, 0.0, 0.0}; }
};

// Two-sided confidence degree and its standard-normal quantile alpha
// (e.g. 95% -> 1.96).
struct ConfidenceDegree {
  int percent = 99;
  double alpha = 2.5758293035489004;

  static ConfidenceDegree from_percent(int percent) {
    switch (percent) {
      case 50: return {50, 0.67448975019608171};
      case 80: return {80, 1.2815515655446004};
      case 95: return {95, 1.959963984540054};
      case 99: return {99, 2.5758293035489004};
      default: throw std::invalid_argument("ConfidenceDegree: percent must be 50, 80, 95 or 99");
    }
  }
};

inline double sample_gamma(const GammaStrategy& strategy, Rng& rng) {
  switch (strategy.kind) {
    case GammaStrategy::Kind::kUniform: return rng.uniform();
    case GammaStrategy::Kind::kGauss: {
      double g = rng.normal(strategy.gauss_mean, strategy.gauss_std);
      return std::min(1.0, std::max(0.0, g));
    }
    case GammaStrategy::Kind::kHalf: return 0.5;
  }
  throw std::logic_error("sample_gamma: unknown strategy");
}

// Mixes two bags: n_i = round(|a| * gamma) instances from a and
// n_j = round(|b| * (1 - gamma)) from b, each clamped to [1, size - 1] so both
// parents contribute but neither is taken whole. The label uses the effective
// ratio n_i / (n_i + n_j):
//   expected_c = g p_a,c + (1-g) p_b,c
//   sigma_c    = g sqrt(p_a,c (1-p_a,c) / n_i) + (1-g) sqrt(p_b,c (1-p_b,c) / n_j)
inline std::pair<Bag, MixedBagLabel> mix_bags(const Bag& a, const Bag& b, double gamma,
                                              const ConfidenceDegree& degree, Rng& rng,
                                              std::pair<int, int> parent_ids = {-1, -1}) {
  if (a.size() < 2 || b.size() < 2)
    throw std::invalid_argument("mix_bags: both bags need at least 2 instances");
  if (a.label.size() != b.label.size())
    throw std::invalid_argument("mix_bags: class count mismatch");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("mix_bags: gamma outside [0,1]");

  const int na = static_cast<int>(a.size());
  const int nb = static_cast<int>(b.size());
  const int ni = std::clamp(static_cast<int>(std::lround(na * gamma)), 1, na - 1);
  const int nj = std::clamp(static_cast<int>(std::lround(nb * (1.0 - gamma))), 1, nb - 1);

  std::vector<int> ids = rng.sample_without_replacement(a.instance_ids, ni);
  // parents may share instances (overlap-mode bags); b's pool excludes the
  // ones already taken so the mixed bag stays duplicate-free
  std::vector<int> pool_b;
  pool_b.reserve(b.size());
  for (int id : b.instance_ids)
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) pool_b.push_back(id);
  if (static_cast<int>(pool_b.size()) < nj)
    throw std::runtime_error("mix_bags: parents share too many instances to draw the sub-bags");
  std::vector<int> from_b = rng.sample_without_replacement(pool_b, nj);
  ids.insert(ids.end(), from_b.begin(), from_b.end());

  const double g = static_cast<double>(ni) / static_cast<double>(ni + nj);
  const std::size_t C = a.label.size();
  std::vector<double> expected(C);
  std::vector<double> sigma(C);
  for (std::size_t c = 0; c < C; ++c) {
    expected[c] = g * a.label[c] + (1.0 - g) * b.label[c];
    sigma[c] = g * std::sqrt(a.label[c] * (1.0 - a.label[c]) / ni) +
               (1.0 - g) * std::sqrt(b.label[c] * (1.0 - b.label[c]) / nj);
  }

  MixedBagLabel label;
  label.expected = ProportionVector(expected);
  label.sigma = std::move(sigma);
  label.alpha = degree.alpha;
  label.gamma = g;
  label.parent_ids = parent_ids;
  label.validate();
  return {Bag(std::move(ids), label.expected), std::move(label)};
}

// Per-class confidence bounds expected_c +- alpha * sigma_c, clamped to [0,1].
inline std::vector<std::pair<double, double>> ci_bounds(const MixedBagLabel& label) {
  std::vector<std::pair<double, double>> bounds(label.expected.size());
  for (std::size_t c = 0; c < label.expected.size(); ++c) {
    const double half_width = label.alpha * label.sigma[c];
    bounds[c] = {std::max(0.0, label.expected[c] - half_width),
                 std::min(1.0, label.expected[c] + half_width)};
  }
  return bounds;
}

}  // namespace mixbag
