#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mixbag/rng.hpp"

namespace mixbag {

// Top-2 principal components of a point cloud, computed by power iteration
// with deflation on the sample covariance (tolerance 1e-10, at most 10000
// iterations per component). components_found < 2 signals a rank-deficient
// covariance; missing components are zero-filled.
struct Pca2 {
  std::vector<double> mean;
  std::vector<double> component1, component2;
  double eigenvalue1 = 0.0, eigenvalue2 = 0.0;
  int components_found = 0;

  std::pair<double, double> project(const std::vector<double>& x) const {
    double a = 0.0, b = 0.0;
    for (std::size_t d = 0; d < mean.size(); ++d) {
      const double centered = x[d] - mean[d];
      a += centered * component1[d];
      b += centered * component2[d];
    }
    return {a, b};
  }
};

namespace detail {

inline std::pair<std::vector<double>, double> power_iteration(const std::vector<double>& cov,
                                                              std::size_t d, double scale,
                                                              Rng& rng) {
  constexpr double kTol = 1e-10;
  constexpr int kMaxIter = 10000;
  std::vector<double> v(d), w(d);
  double norm = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    v[i] = rng.uniform(-1.0, 1.0);
    norm += v[i] * v[i];
  }
  norm = std::sqrt(norm);
  for (std::size_t i = 0; i < d; ++i) v[i] /= norm;

  for (int it = 0; it < kMaxIter; ++it) {
    for (std::size_t i = 0; i < d; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += cov[i * d + k] * v[k];
      w[i] = s;
    }
    double wlen = 0.0;
    for (double x : w) wlen += x * x;
    wlen = std::sqrt(wlen);
    if (wlen <= 1e-14 * scale) return {std::vector<double>(d, 0.0), 0.0};
    double diff = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      w[i] /= wlen;
      diff = std::max(diff, std::fabs(w[i] - v[i]));
    }
    v = w;
    if (diff < kTol) break;
  }
  // Rayleigh quotient and a deterministic sign (largest-magnitude entry > 0).
  double lambda = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += cov[i * d + k] * v[k];
    lambda += v[i] * s;
  }
  std::size_t imax = 0;
  for (std::size_t i = 1; i < d; ++i)
    if (std::fabs(v[i]) > std::fabs(v[imax])) imax = i;
  if (v[imax] < 0.0)
    for (double& x : v) x = -x;
  return {std::move(v), lambda};
}

}  // namespace detail

inline Pca2 pca2(const std::vector<std::vector<double>>& points) {
  if (points.size() < 2) throw std::invalid_argument("pca2: need at least 2 points");
  const std::size_t n = points.size(), d = points.front().size();
  for (const auto& p : points)
    if (p.size() != d) throw std::invalid_argument("pca2: inconsistent dimensions");

  Pca2 out;
  out.mean.assign(d, 0.0);
  for (const auto& p : points)
    for (std::size_t i = 0; i < d; ++i) out.mean[i] += p[i];
  for (double& m : out.mean) m /= static_cast<double>(n);

  std::vector<double> cov(d * d, 0.0);
  for (const auto& p : points)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t k = 0; k < d; ++k)
        cov[i * d + k] += (p[i] - out.mean[i]) * (p[k] - out.mean[k]);
  for (double& c : cov) c /= static_cast<double>(n - 1);

  double trace = 0.0;
  for (std::size_t i = 0; i < d; ++i) trace += cov[i * d + i];
  const double scale = std::max(1.0, trace);

  Rng rng(0x9E3779B97F4A7C15ULL);  // fixed start so results are reproducible
  auto [v1, l1] = detail::power_iteration(cov, d, scale, rng);
  out.component1 = v1;
  out.eigenvalue1 = l1;
  if (l1 > 1e-14 * scale) ++out.components_found;

  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) cov[i * d + k] -= l1 * v1[i] * v1[k];
  auto [v2, l2] = detail::power_iteration(cov, d, scale, rng);
  out.component2 = v2;
  out.eigenvalue2 = l2;
  if (l2 > 1e-14 * scale) ++out.components_found;

  return out;
}

}  // namespace mixbag
