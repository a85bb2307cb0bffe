#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "mixbag/bag.hpp"
#include "mixbag/data.hpp"
#include "mixbag/loss.hpp"
#include "mixbag/mix.hpp"
#include "mixbag/model.hpp"

namespace mixbag {

enum class BagVariant { kMixBag, kUnion, kSubBag };

struct TrainConfig {
  double lr = 3e-4;
  int max_epochs = 1000;
  int batch_bags = 32;
  int early_stop_patience = 10;

  Architecture architecture = Architecture::kLinear;
  int hidden = 64;  // used by the mlp only

  bool mixbag_enabled = true;
  double mix_per_batch_ratio = 1.0;  // augmented bags per original bag in a batch
  GammaStrategy gamma_strategy = GammaStrategy::uniform();
  ConfidenceDegree confidence_degree = ConfidenceDegree::from_percent(99);
  BagVariant variant = BagVariant::kMixBag;
  bool with_ci = true;

  std::uint64_t rng_seed = 0;

  void validate() const {
    if (!(lr > 0.0)) throw std::invalid_argument("TrainConfig: lr must be > 0");
    if (max_epochs < 1) throw std::invalid_argument("TrainConfig: max_epochs must be >= 1");
    if (batch_bags < 1) throw std::invalid_argument("TrainConfig: batch_bags must be >= 1");
    if (early_stop_patience < 1)
      throw std::invalid_argument("TrainConfig: early_stop_patience must be >= 1");
    if (!(mix_per_batch_ratio >= 0.0))
      throw std::invalid_argument("TrainConfig: mix_per_batch_ratio must be >= 0");
    if (architecture == Architecture::kMlp && hidden < 1)
      throw std::invalid_argument("TrainConfig: hidden must be >= 1 for the mlp");
  }
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  // Fraction of class terms of CI-loss evaluations whose gate let the loss
  // through (estimate outside the interval). 0 when no CI loss was evaluated.
  double gate_off_fraction = 0.0;
};

struct TrainLog {
  std::vector<EpochStats> epochs;
  int best_epoch = -1;
  double best_val_loss = std::numeric_limits<double>::infinity();
  int skipped_augmentation_batches = 0;  // batches of one bag, pairing impossible
};

struct EvalResult {
  Matrix confusion;  // confusion(true_class, predicted)
  double accuracy = 0.0;
};

inline Matrix gather_features(const Dataset& ds, const std::vector<int>& ids) {
  Matrix out(ids.size(), ds.feature_dim);
  for (std::size_t j = 0; j < ids.size(); ++j) {
    const Instance& ins = ds.instances.at(ids[j]);
    for (int d = 0; d < ds.feature_dim; ++d) out(j, d) = ins.features[d];
  }
  return out;
}

// Instance-level argmax accuracy and confusion matrix over the given ids.
// Ties resolve to the lowest class index.
inline EvalResult evaluate(const ModelParams& params, const Dataset& ds,
                           const std::vector<int>& instance_ids) {
  if (instance_ids.empty()) throw std::invalid_argument("evaluate: empty instance set");
  const int C = ds.num_classes;
  EvalResult res;
  res.confusion = Matrix(C, C, 0.0);
  Matrix probs = forward(params, gather_features(ds, instance_ids));
  std::size_t correct = 0;
  for (std::size_t j = 0; j < instance_ids.size(); ++j) {
    const Instance& ins = ds.instances.at(instance_ids[j]);
    if (!ins.has_label()) throw std::invalid_argument("evaluate: unlabeled instance");
    int pred = 0;
    for (int c = 1; c < C; ++c)
      if (probs(j, c) > probs(j, pred)) pred = c;
    res.confusion(ins.true_class, pred) += 1.0;
    if (pred == ins.true_class) ++correct;
  }
  res.accuracy = static_cast<double>(correct) / static_cast<double>(instance_ids.size());
  return res;
}

namespace detail {

inline double mean_proportion_loss(const ModelParams& params, const Dataset& ds,
                                   const std::vector<Bag>& bags) {
  double total = 0.0;
  for (const Bag& bag : bags) {
    BagPrediction pred = make_bag_prediction(forward(params, gather_features(ds, bag.instance_ids)));
    total += proportion_loss(pred, bag.label).value;
  }
  return total / static_cast<double>(bags.size());
}

}  // namespace detail

// Trains on proportion labels only. Each batch takes one Adam step on
//   mean proportion loss over the batch's original bags
// + mean loss over freshly generated augmented bags (per cfg.variant), the
// latter scored by the CI loss when cfg.with_ci is set (the union variant's
// labels are exact, so it always uses the plain proportion loss).
// Augmented bags are regenerated every batch and never cached. Validation
// uses the proportion loss on val_bags; the returned parameters are the ones
// with the best validation loss.
inline std::pair<ModelParams, TrainLog> train(const Dataset& ds, const std::vector<Bag>& bags,
                                              const std::vector<Bag>& val_bags,
                                              const TrainConfig& cfg) {
  cfg.validate();
  if (bags.empty()) throw std::invalid_argument("train: no training bags");
  if (val_bags.empty()) throw std::invalid_argument("train: no validation bags");

  Rng rng(cfg.rng_seed);
  ModelParams params = init_params(cfg.architecture, ds.feature_dim, ds.num_classes,
                                   cfg.architecture == Architecture::kMlp ? cfg.hidden : 0, rng);
  AdamState adam(params.param_count(), cfg.lr);

  TrainLog log;
  ModelParams best_params = params;
  int epochs_since_improvement = 0;

  std::vector<std::size_t> order(bags.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<double> grad(params.param_count());

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t num_batches = 0;
    std::size_t gate_terms_active = 0;
    std::size_t gate_terms_total = 0;

    for (std::size_t start = 0; start < order.size(); start += cfg.batch_bags) {
      const std::size_t batch_count = std::min<std::size_t>(cfg.batch_bags, order.size() - start);
      std::fill(grad.begin(), grad.end(), 0.0);

      double orig_loss = 0.0;
      const double orig_scale = 1.0 / static_cast<double>(batch_count);
      for (std::size_t k = 0; k < batch_count; ++k) {
        const Bag& bag = bags[order[start + k]];
        Matrix feats = gather_features(ds, bag.instance_ids);
        BagPrediction pred = make_bag_prediction(forward(params, feats));
        LossValueWithGrad lv = proportion_loss(pred, bag.label);
        orig_loss += lv.value;
        backward_accumulate(params, feats, lv.grad, grad, orig_scale);
      }
      double batch_loss = orig_loss * orig_scale;

      const std::size_t aug_target =
          cfg.mixbag_enabled
              ? static_cast<std::size_t>(
                    std::ceil(cfg.mix_per_batch_ratio * static_cast<double>(batch_count)))
              : 0;
      if (aug_target > 0) {
        if (batch_count < 2) {
          ++log.skipped_augmentation_batches;
        } else {
          double aug_loss = 0.0;
          const double aug_scale = 1.0 / static_cast<double>(aug_target);
          for (std::size_t k = 0; k < aug_target; ++k) {
            // pick one parent (and a distinct second for the pair variants)
            const std::size_t ia = rng.uniform_int(batch_count);
            Bag aug_bag;
            MixedBagLabel aug_label;
            bool statistical = false;  // true when the label carries a CI
            if (cfg.variant == BagVariant::kUnion) {
              std::size_t ib = rng.uniform_int(batch_count - 1);
              if (ib >= ia) ++ib;
              aug_bag = union_bags(bags[order[start + ia]], bags[order[start + ib]]);
            } else if (cfg.variant == BagVariant::kMixBag) {
              std::size_t ib = rng.uniform_int(batch_count - 1);
              if (ib >= ia) ++ib;
              const double gamma = sample_gamma(cfg.gamma_strategy, rng);
              auto mixed = mix_bags(bags[order[start + ia]], bags[order[start + ib]], gamma,
                                    cfg.confidence_degree, rng,
                                    {static_cast<int>(order[start + ia]),
                                     static_cast<int>(order[start + ib])});
              aug_bag = std::move(mixed.first);
              aug_label = std::move(mixed.second);
              statistical = true;
            } else {
              const Bag& parent = bags[order[start + ia]];
              const double gamma = sample_gamma(cfg.gamma_strategy, rng);
              const int n = std::clamp(
                  static_cast<int>(std::lround(gamma * static_cast<double>(parent.size()))), 1,
                  static_cast<int>(parent.size()));
              auto sb = sub_bag(parent, n, rng, cfg.confidence_degree.alpha,
                                static_cast<int>(order[start + ia]));
              aug_bag = std::move(sb.first);
              aug_label = std::move(sb.second);
              statistical = true;
            }

            Matrix feats = gather_features(ds, aug_bag.instance_ids);
            BagPrediction pred = make_bag_prediction(forward(params, feats));
            LossValueWithGrad lv;
            if (statistical && cfg.with_ci) {
              std::vector<int> gate = ci_gate(pred, aug_label);
              for (int g : gate) gate_terms_active += static_cast<std::size_t>(g);
              gate_terms_total += gate.size();
              lv = gated_proportion_loss(pred, aug_label.expected, gate);
            } else {
              lv = proportion_loss(pred, aug_bag.label);
            }
            aug_loss += lv.value;
            backward_accumulate(params, feats, lv.grad, grad, aug_scale);
          }
          batch_loss += aug_loss * aug_scale;
        }
      }

      adam_step(params, grad, adam);
      epoch_loss += batch_loss;
      ++num_batches;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = epoch_loss / static_cast<double>(num_batches);
    stats.val_loss = detail::mean_proportion_loss(params, ds, val_bags);
    stats.gate_off_fraction =
        gate_terms_total == 0
            ? 0.0
            : static_cast<double>(gate_terms_active) / static_cast<double>(gate_terms_total);
    log.epochs.push_back(stats);

    if (stats.val_loss < log.best_val_loss) {
      log.best_val_loss = stats.val_loss;
      log.best_epoch = epoch;
      best_params = params;
      epochs_since_improvement = 0;
    } else {
      ++epochs_since_improvement;
      if (epochs_since_improvement >= cfg.early_stop_patience) break;
    }
  }

  return {std::move(best_params), std::move(log)};
}

}  // namespace mixbag
