#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mixbag/data.hpp"
#include "mixbag/rng.hpp"

namespace mixbag {

// An index set over a dataset plus its proportion label. Instances are
// sampled without replacement, so ids are distinct.
struct Bag {
  std::vector<int> instance_ids;
  ProportionVector label;

  Bag() = default;
  Bag(std::vector<int> ids, ProportionVector lbl)
      : instance_ids(std::move(ids)), label(std::move(lbl)) {
    if (instance_ids.empty()) throw std::invalid_argument("Bag: empty instance set");
    std::vector<int> sorted = instance_ids;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("Bag: duplicate instance ids");
  }

  std::size_t size() const { return instance_ids.size(); }
};

// Statistical label of an augmented bag: expected proportion, per-class
// standard deviation, the CI multiplier alpha and the realized mixing ratio.
struct MixedBagLabel {
  ProportionVector expected;
  std::vector<double> sigma;
  double alpha = 0.0;
  double gamma = 1.0;
  std::pair<int, int> parent_ids{-1, -1};

  void validate() const {
    if (sigma.size() != expected.size())
      throw std::invalid_argument("MixedBagLabel: sigma size mismatch");
    for (double s : sigma)
      if (!(s >= 0.0)) throw std::invalid_argument("MixedBagLabel: negative sigma");
    if (!(alpha >= 0.0)) throw std::invalid_argument("MixedBagLabel: negative alpha");
    if (!(gamma >= 0.0 && gamma <= 1.0))
      throw std::invalid_argument("MixedBagLabel: gamma outside [0,1]");
  }
};

struct BagGenConfig {
  int num_bags = 512;
  int bag_size = 10;
  bool allow_overlap = false;
  double proportion_std = 0.15;  // std of the Gaussian the class proportions are drawn from
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (num_bags < 1) throw std::invalid_argument("BagGenConfig: num_bags must be >= 1");
    if (bag_size < 1) throw std::invalid_argument("BagGenConfig: bag_size must be >= 1");
    if (!(proportion_std > 0.0))
      throw std::invalid_argument("BagGenConfig: proportion_std must be > 0");
  }
};

// Draws a class-proportion vector: one Gaussian per class centered at 1/C,
// clamped to [1e-6, 1], renormalized to sum 1.
inline ProportionVector sample_proportion(int num_classes, double proportion_std, Rng& rng) {
  if (num_classes < 2) throw std::invalid_argument("sample_proportion: num_classes must be >= 2");
  constexpr double kEps = 1e-6;
  std::vector<double> p(num_classes);
  double sum = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    double v = rng.normal(1.0 / num_classes, proportion_std);
    v = std::min(1.0, std::max(kEps, v));
    p[c] = v;
    sum += v;
  }
  for (double& v : p) v /= sum;
  return ProportionVector(p);
}

// Largest-remainder (Hamilton) rounding of proportions to integer counts that
// sum to total; each count differs from p_c * total by less than 1. Ties in
// the fractional remainder go to the lower class index.
inline std::vector<int> largest_remainder_counts(const ProportionVector& p, int total) {
  const int C = static_cast<int>(p.size());
  std::vector<int> counts(C);
  std::vector<double> remainder(C);
  int assigned = 0;
  for (int c = 0; c < C; ++c) {
    double quota = p[c] * total;
    counts[c] = static_cast<int>(std::floor(quota));
    remainder[c] = quota - counts[c];
    assigned += counts[c];
  }
  std::vector<int> order(C);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return remainder[a] > remainder[b]; });
  for (int i = 0; i < total - assigned; ++i) ++counts[order[i]];
  return counts;
}

// Exact class histogram of a set of instances, as a proportion vector.
// Requires every referenced instance to carry a true class. Analysis and
// bag-construction use only; never available to losses.
inline ProportionVector realized_histogram(const Dataset& ds, const std::vector<int>& ids) {
  if (ids.empty()) throw std::invalid_argument("realized_histogram: empty id set");
  std::vector<double> counts(ds.num_classes, 0.0);
  for (int id : ids) {
    const Instance& ins = ds.instances.at(id);
    if (!ins.has_label()) throw std::invalid_argument("realized_histogram: unlabeled instance");
    counts[ins.true_class] += 1.0;
  }
  for (double& v : counts) v /= static_cast<double>(ids.size());
  return ProportionVector(counts);
}

namespace detail {

// Shared bag-construction core. `pools` holds the per-class candidate ids; in
// non-overlap mode drawn ids are removed so later bags cannot reuse them.
inline std::vector<Bag> make_bags_from_pools(std::vector<std::vector<int>>& pools,
                                             const BagGenConfig& cfg, int num_classes, Rng& rng) {
  std::vector<Bag> bags;
  bags.reserve(cfg.num_bags);
  for (int b = 0; b < cfg.num_bags; ++b) {
    ProportionVector drawn = sample_proportion(num_classes, cfg.proportion_std, rng);
    std::vector<int> counts = largest_remainder_counts(drawn, cfg.bag_size);
    std::vector<int> ids;
    ids.reserve(cfg.bag_size);
    std::vector<double> label(num_classes);
    for (int c = 0; c < num_classes; ++c) {
      if (counts[c] == 0) continue;
      if (counts[c] > static_cast<int>(pools[c].size()))
        throw std::runtime_error("make_bags: insufficient instances of class " +
                                 std::to_string(c) + " (need " + std::to_string(counts[c]) +
                                 ", have " + std::to_string(pools[c].size()) + ")");
      std::vector<int> picked = cfg.allow_overlap
                                    ? rng.sample_without_replacement(pools[c], counts[c])
                                    : rng.draw_and_remove(pools[c], counts[c]);
      ids.insert(ids.end(), picked.begin(), picked.end());
    }
    // The label is the realized count vector over bag_size, not the raw draw.
    for (int c = 0; c < num_classes; ++c)
      label[c] = static_cast<double>(counts[c]) / static_cast<double>(cfg.bag_size);
    bags.emplace_back(std::move(ids), ProportionVector(label));
  }
  return bags;
}

}  // namespace detail

// Builds labeled bags restricted to the given instance ids (all must carry a
// true class). In overlap mode bags may share instances; otherwise each
// instance appears in at most one bag.
inline std::vector<Bag> make_bags_from_pool(const Dataset& ds, const std::vector<int>& pool,
                                            const BagGenConfig& cfg) {
  cfg.validate();
  std::vector<std::vector<int>> pools(ds.num_classes);
  for (int id : pool) {
    const Instance& ins = ds.instances.at(id);
    if (!ins.has_label()) throw std::invalid_argument("make_bags: unlabeled instance in pool");
    pools[ins.true_class].push_back(id);
  }
  Rng rng(cfg.rng_seed);
  return detail::make_bags_from_pools(pools, cfg, ds.num_classes, rng);
}

inline std::vector<Bag> make_bags(const Dataset& ds, const BagGenConfig& cfg) {
  std::vector<int> all(ds.size());
  std::iota(all.begin(), all.end(), 0);
  return make_bags_from_pool(ds, all, cfg);
}

// Combines two bags without sampling. The label is the size-weighted mean of
// the parents' labels, computed through the underlying integer counts so it
// equals the exact histogram of the union when the parents' labels do.
inline Bag union_bags(const Bag& a, const Bag& b) {
  const std::size_t C = a.label.size();
  if (b.label.size() != C) throw std::invalid_argument("union_bags: class count mismatch");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::vector<int> ids = a.instance_ids;
  ids.insert(ids.end(), b.instance_ids.begin(), b.instance_ids.end());
  std::vector<double> label(C);
  double count_sum = 0.0;
  for (std::size_t c = 0; c < C; ++c) {
    label[c] = std::round(a.label[c] * na) + std::round(b.label[c] * nb);
    count_sum += label[c];
  }
  if (count_sum == na + nb) {
    for (std::size_t c = 0; c < C; ++c) label[c] /= (na + nb);
  } else {
    // labels not backed by integer counts; fall back to the weighted mean
    for (std::size_t c = 0; c < C; ++c)
      label[c] = (a.label[c] * na + b.label[c] * nb) / (na + nb);
  }
  return Bag(std::move(ids), ProportionVector(label));
}

// Samples n instances from one bag without replacement. The returned bag's
// exact proportion is unknown; the statistical label carries the parent's
// proportion as the expectation and sigma_c = sqrt(p_c (1 - p_c) / n).
inline std::pair<Bag, MixedBagLabel> sub_bag(const Bag& a, int n, Rng& rng, double alpha = 0.0,
                                             int parent_id = -1) {
  if (n < 1 || n > static_cast<int>(a.size()))
    throw std::invalid_argument("sub_bag: n must be in [1, |bag|]");
  std::vector<int> ids = rng.sample_without_replacement(a.instance_ids, n);
  MixedBagLabel label;
  label.expected = a.label;
  label.sigma.resize(a.label.size());
  for (std::size_t c = 0; c < a.label.size(); ++c)
    label.sigma[c] = std::sqrt(a.label[c] * (1.0 - a.label[c]) / static_cast<double>(n));
  label.alpha = alpha;
  label.gamma = 1.0;
  label.parent_ids = {parent_id, parent_id};
  label.validate();
  return {Bag(std::move(ids), a.label), std::move(label)};
}

}  // namespace mixbag
