#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mixbag/bag.hpp"
#include "mixbag/data.hpp"
#include "mixbag/io.hpp"
#include "mixbag/mix.hpp"
#include "mixbag/pca.hpp"
#include "mixbag/train.hpp"

namespace mixbag {

// Raised for malformed configuration; messages carry the JSON field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DatasetSpec {
  enum class Kind { kBlobs, kCsv };
  Kind kind = Kind::kBlobs;
  int num_classes = 3;
  // blobs
  int per_class = 400;
  int dim = 8;
  double spread = 0.6;
  // csv
  std::string path;
  bool has_header = false;
};

struct SweepSpec {
  enum class Mode { kVaryBagsFixedSize, kVarySizeFixedBags, kVaryBagsOverlap };
  Mode mode = Mode::kVaryBagsFixedSize;
  std::vector<int> levels;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  BagGenConfig bags;
  TrainConfig train;
  int num_seeds = 5;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  int export_num_mixed = 0;  // 0 -> one mixed label per original bag
  SweepSpec sweep;

  void validate() const {
    bags.validate();
    train.validate();
    if (num_seeds < 1) throw ConfigError("num_seeds: must be >= 1");
  }
};

struct RunResult {
  std::vector<double> per_seed_accuracy;
  double mean_accuracy = 0.0;
  std::string config_hash;
  double wall_seconds = 0.0;  // reported on the console, not persisted
};

// ---- config JSON ---------------------------------------------------------

namespace cfgdetail {

template <typename T>
T get_req(const nlohmann::json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) throw ConfigError(path + key + ": missing");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(path + key + ": wrong type");
  }
}

template <typename T>
T get_opt(const nlohmann::json& j, const std::string& path, const char* key, T def) {
  if (!j.contains(key)) return def;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(path + key + ": wrong type");
  }
}

}  // namespace cfgdetail

inline GammaStrategy parse_gamma_strategy(const nlohmann::json& j, const std::string& path) {
  const std::string kind = cfgdetail::get_req<std::string>(j, path, "strategy");
  if (kind == "uniform") return GammaStrategy::uniform();
  if (kind == "half") return GammaStrategy::half();
  if (kind == "gauss")
    return GammaStrategy::gauss(cfgdetail::get_opt<double>(j, path, "mean", 0.5),
                                cfgdetail::get_opt<double>(j, path, "std", 0.25));
  throw ConfigError(path + "strategy: must be 'uniform', 'gauss' or 'half'");
}

inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
  ExperimentConfig cfg;
  try {
    if (j.contains("dataset")) {
      const nlohmann::json& d = j.at("dataset");
      const std::string type = cfgdetail::get_req<std::string>(d, "dataset.", "type");
      if (type == "blobs") {
        cfg.dataset.kind = DatasetSpec::Kind::kBlobs;
        cfg.dataset.num_classes = cfgdetail::get_opt<int>(d, "dataset.", "num_classes", 3);
        cfg.dataset.per_class = cfgdetail::get_opt<int>(d, "dataset.", "per_class", 400);
        cfg.dataset.dim = cfgdetail::get_opt<int>(d, "dataset.", "dim", 8);
        cfg.dataset.spread = cfgdetail::get_opt<double>(d, "dataset.", "spread", 0.6);
      } else if (type == "csv") {
        cfg.dataset.kind = DatasetSpec::Kind::kCsv;
        cfg.dataset.path = cfgdetail::get_req<std::string>(d, "dataset.", "path");
        cfg.dataset.num_classes = cfgdetail::get_req<int>(d, "dataset.", "num_classes");
        cfg.dataset.has_header = cfgdetail::get_opt<bool>(d, "dataset.", "has_header", false);
      } else {
        throw ConfigError("dataset.type: must be 'blobs' or 'csv'");
      }
    }
    if (j.contains("bags")) {
      const nlohmann::json& b = j.at("bags");
      cfg.bags.num_bags = cfgdetail::get_opt<int>(b, "bags.", "num_bags", cfg.bags.num_bags);
      cfg.bags.bag_size = cfgdetail::get_opt<int>(b, "bags.", "bag_size", cfg.bags.bag_size);
      cfg.bags.allow_overlap =
          cfgdetail::get_opt<bool>(b, "bags.", "allow_overlap", cfg.bags.allow_overlap);
      cfg.bags.proportion_std =
          cfgdetail::get_opt<double>(b, "bags.", "proportion_std", cfg.bags.proportion_std);
    }
    if (j.contains("train")) {
      const nlohmann::json& t = j.at("train");
      cfg.train.lr = cfgdetail::get_opt<double>(t, "train.", "lr", cfg.train.lr);
      cfg.train.max_epochs = cfgdetail::get_opt<int>(t, "train.", "max_epochs", cfg.train.max_epochs);
      cfg.train.batch_bags = cfgdetail::get_opt<int>(t, "train.", "batch_bags", cfg.train.batch_bags);
      cfg.train.early_stop_patience =
          cfgdetail::get_opt<int>(t, "train.", "early_stop_patience", cfg.train.early_stop_patience);
      const std::string arch = cfgdetail::get_opt<std::string>(t, "train.", "architecture", "linear");
      if (arch == "linear") cfg.train.architecture = Architecture::kLinear;
      else if (arch == "mlp") cfg.train.architecture = Architecture::kMlp;
      else throw ConfigError("train.architecture: must be 'linear' or 'mlp'");
      cfg.train.hidden = cfgdetail::get_opt<int>(t, "train.", "hidden", cfg.train.hidden);
      cfg.train.mixbag_enabled =
          cfgdetail::get_opt<bool>(t, "train.", "mixbag_enabled", cfg.train.mixbag_enabled);
      cfg.train.mix_per_batch_ratio = cfgdetail::get_opt<double>(t, "train.", "mix_per_batch_ratio",
                                                                 cfg.train.mix_per_batch_ratio);
      if (t.contains("gamma")) cfg.train.gamma_strategy = parse_gamma_strategy(t.at("gamma"), "train.gamma.");
      const int percent = cfgdetail::get_opt<int>(t, "train.", "confidence_percent", 99);
      try {
        cfg.train.confidence_degree = ConfidenceDegree::from_percent(percent);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("train.confidence_percent: ") + e.what());
      }
      const std::string variant = cfgdetail::get_opt<std::string>(t, "train.", "variant", "mixbag");
      if (variant == "mixbag") cfg.train.variant = BagVariant::kMixBag;
      else if (variant == "union") cfg.train.variant = BagVariant::kUnion;
      else if (variant == "subbag") cfg.train.variant = BagVariant::kSubBag;
      else throw ConfigError("train.variant: must be 'mixbag', 'union' or 'subbag'");
      cfg.train.with_ci = cfgdetail::get_opt<bool>(t, "train.", "with_ci", cfg.train.with_ci);
    }
    cfg.num_seeds = cfgdetail::get_opt<int>(j, "", "num_seeds", cfg.num_seeds);
    cfg.seed = cfgdetail::get_opt<std::uint64_t>(j, "", "seed", cfg.seed);
    cfg.out_dir = cfgdetail::get_opt<std::string>(j, "", "out_dir", cfg.out_dir);
    cfg.export_num_mixed = cfgdetail::get_opt<int>(j, "", "export_num_mixed", 0);
    if (j.contains("sweep")) {
      const nlohmann::json& s = j.at("sweep");
      const std::string mode = cfgdetail::get_req<std::string>(s, "sweep.", "mode");
      if (mode == "vary_bags_fixed_size") cfg.sweep.mode = SweepSpec::Mode::kVaryBagsFixedSize;
      else if (mode == "vary_size_fixed_bags") cfg.sweep.mode = SweepSpec::Mode::kVarySizeFixedBags;
      else if (mode == "vary_bags_overlap") cfg.sweep.mode = SweepSpec::Mode::kVaryBagsOverlap;
      else throw ConfigError("sweep.mode: unknown mode '" + mode + "'");
      cfg.sweep.levels = cfgdetail::get_req<std::vector<int>>(s, "sweep.", "levels");
      if (!std::is_sorted(cfg.sweep.levels.begin(), cfg.sweep.levels.end()))
        throw ConfigError("sweep.levels: must be ascending");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_experiment_config(j);
}

inline nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json d;
  if (cfg.dataset.kind == DatasetSpec::Kind::kBlobs) {
    d = {{"type", "blobs"},
         {"num_classes", cfg.dataset.num_classes},
         {"per_class", cfg.dataset.per_class},
         {"dim", cfg.dataset.dim},
         {"spread", cfg.dataset.spread}};
  } else {
    d = {{"type", "csv"},
         {"path", cfg.dataset.path},
         {"num_classes", cfg.dataset.num_classes},
         {"has_header", cfg.dataset.has_header}};
  }
  nlohmann::json g;
  switch (cfg.train.gamma_strategy.kind) {
    case GammaStrategy::Kind::kUniform: g = {{"strategy", "uniform"}}; break;
    case GammaStrategy::Kind::kHalf: g = {{"strategy", "half"}}; break;
    case GammaStrategy::Kind::kGauss:
      g = {{"strategy", "gauss"},
           {"mean", cfg.train.gamma_strategy.gauss_mean},
           {"std", cfg.train.gamma_strategy.gauss_std}};
      break;
  }
  return {{"dataset", d},
          {"bags",
           {{"num_bags", cfg.bags.num_bags},
            {"bag_size", cfg.bags.bag_size},
            {"allow_overlap", cfg.bags.allow_overlap},
            {"proportion_std", cfg.bags.proportion_std}}},
          {"train",
           {{"lr", cfg.train.lr},
            {"max_epochs", cfg.train.max_epochs},
            {"batch_bags", cfg.train.batch_bags},
            {"early_stop_patience", cfg.train.early_stop_patience},
            {"architecture", cfg.train.architecture == Architecture::kLinear ? "linear" : "mlp"},
            {"hidden", cfg.train.hidden},
            {"mixbag_enabled", cfg.train.mixbag_enabled},
            {"mix_per_batch_ratio", cfg.train.mix_per_batch_ratio},
            {"gamma", g},
            {"confidence_percent", cfg.train.confidence_degree.percent},
            {"variant", cfg.train.variant == BagVariant::kMixBag
                            ? "mixbag"
                            : (cfg.train.variant == BagVariant::kUnion ? "union" : "subbag")},
            {"with_ci", cfg.train.with_ci}}},
          {"num_seeds", cfg.num_seeds},
          {"seed", cfg.seed}};
}

inline std::string config_hash_hex(const ExperimentConfig& cfg) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(experiment_config_to_json(cfg).dump())));
  return buf;
}

// ---- orchestration --------------------------------------------------------

namespace detail {

// rng stream ids for the per-fold derivations
constexpr std::uint64_t kStreamData = 0xD0;
constexpr std::uint64_t kStreamSplit = 1;
constexpr std::uint64_t kStreamBags = 2;
constexpr std::uint64_t kStreamValSplit = 3;
constexpr std::uint64_t kStreamTrain = 4;
constexpr std::uint64_t kStreamExtraBags = 5;

inline Dataset build_dataset(const DatasetSpec& spec, std::uint64_t seed) {
  if (spec.kind == DatasetSpec::Kind::kCsv)
    return load_csv(spec.path, spec.num_classes, spec.has_header);
  Rng rng(derive_seed(seed, kStreamData));
  return make_blobs(spec.num_classes, spec.per_class, spec.dim, spec.spread, rng);
}

struct InstanceSplit {
  std::vector<int> pool;  // labeled instances available for bag construction
  std::vector<int> test;  // held-out labeled instances for evaluation
};

// Stratified per-class split; ~fraction of every class is held out.
inline InstanceSplit split_instances(const Dataset& ds, double test_fraction, std::uint64_t seed) {
  Rng rng(seed);
  InstanceSplit out;
  for (int c = 0; c < ds.num_classes; ++c) {
    std::vector<int> ids = ds.indices_of_class(c);
    rng.shuffle(ids);
    std::size_t n_test = static_cast<std::size_t>(
        std::lround(test_fraction * static_cast<double>(ids.size())));
    if (n_test >= ids.size() && !ids.empty()) n_test = ids.size() - 1;
    for (std::size_t i = 0; i < ids.size(); ++i)
      (i < n_test ? out.test : out.pool).push_back(ids[i]);
  }
  return out;
}

// 20% of bags (by count, at least one of each) go to validation.
inline std::pair<std::vector<Bag>, std::vector<Bag>> split_bags(const std::vector<Bag>& bags,
                                                                std::uint64_t seed) {
  if (bags.size() < 2)
    throw std::invalid_argument("run_experiment: need at least 2 bags for a validation split");
  std::vector<std::size_t> order(bags.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  std::size_t n_val = static_cast<std::size_t>(std::lround(0.2 * static_cast<double>(bags.size())));
  n_val = std::max<std::size_t>(1, std::min(n_val, bags.size() - 1));
  std::vector<Bag> val, tr;
  for (std::size_t i = 0; i < order.size(); ++i)
    (i < n_val ? val : tr).push_back(bags[order[i]]);
  return {std::move(tr), std::move(val)};
}

struct FoldOutcome {
  double accuracy = 0.0;
  TrainLog log;
  ModelParams params;
};

inline FoldOutcome run_fold(const Dataset& ds, const std::vector<Bag>& bags,
                            const TrainConfig& base_train, std::uint64_t fold_seed,
                            const std::vector<int>& test_ids) {
  auto [train_bags, val_bags] = split_bags(bags, derive_seed(fold_seed, kStreamValSplit));
  TrainConfig tcfg = base_train;
  tcfg.rng_seed = derive_seed(fold_seed, kStreamTrain);
  FoldOutcome out;
  auto [params, log] = train(ds, train_bags, val_bags, tcfg);
  out.accuracy = evaluate(params, ds, test_ids).accuracy;
  out.params = std::move(params);
  out.log = std::move(log);
  return out;
}

}  // namespace detail

inline void write_runresult_json(const RunResult& res, const std::string& path) {
  std::ofstream out = detail::open_out(path, "write_runresult_json");
  out << "{\"config_hash\":\"" << res.config_hash << "\",\"per_seed_accuracy\":";
  detail::append_double_array(out, res.per_seed_accuracy);
  out << ",\"mean_accuracy\":" << fmt_g17(res.mean_accuracy) << "}\n";
}

// Runs cfg.num_seeds independent folds: per fold, hold out 20% of the
// labeled instances per class, build bags from the rest, split 20% of the
// bags to validation, train, and score instance-level accuracy on the held
// out split. Writes result.json, trainlog_seed<k>.csv and model_seed<k>.json
// into cfg.out_dir.
inline RunResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories(cfg.out_dir);
  Dataset ds = detail::build_dataset(cfg.dataset, cfg.seed);

  RunResult res;
  res.config_hash = config_hash_hex(cfg);
  for (int fold = 0; fold < cfg.num_seeds; ++fold) {
    const std::uint64_t fold_seed = derive_seed(cfg.seed, 1000 + fold);
    detail::InstanceSplit split =
        detail::split_instances(ds, 0.2, derive_seed(fold_seed, detail::kStreamSplit));
    BagGenConfig bcfg = cfg.bags;
    bcfg.rng_seed = derive_seed(fold_seed, detail::kStreamBags);
    std::vector<Bag> bags = make_bags_from_pool(ds, split.pool, bcfg);
    detail::FoldOutcome fo = detail::run_fold(ds, bags, cfg.train, fold_seed, split.test);
    res.per_seed_accuracy.push_back(fo.accuracy);
    const std::string stem = cfg.out_dir + "/";
    write_trainlog_csv(fo.log, stem + "trainlog_seed" + std::to_string(fold) + ".csv");
    write_checkpoint(fo.params, stem + "model_seed" + std::to_string(fold) + ".json");
  }
  res.mean_accuracy = std::accumulate(res.per_seed_accuracy.begin(), res.per_seed_accuracy.end(),
                                      0.0) /
                      static_cast<double>(res.per_seed_accuracy.size());
  write_runresult_json(res, cfg.out_dir + "/result.json");
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// ---- preliminary sweeps ----------------------------------------------------

struct SweepRow {
  int level = 0;
  double mean_accuracy = 0.0;
};

inline void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  std::ofstream out = detail::open_out(path, "write_sweep_csv");
  out << "level,mean_accuracy\n";
  for (const SweepRow& r : rows) out << r.level << ',' << fmt_g17(r.mean_accuracy) << '\n';
}

// Accuracy versus the number of bags or the bag size, averaged over
// cfg.num_seeds folds per level.
//   vary_bags_fixed_size    levels are bag counts; bags never overlap and the
//                           synthetic dataset is enlarged per level so the
//                           demand fits (more bags mean more instances).
//   vary_size_fixed_bags    levels are bag sizes; same non-overlap scaling.
//   vary_bags_overlap       levels are total bag counts; cfg.bags.num_bags
//                           initial non-overlap bags are built once per fold
//                           and the remainder are drawn, with overlap, from
//                           the instances those initial bags cover.
inline std::vector<SweepRow> run_preliminary_sweep(const ExperimentConfig& cfg,
                                                   SweepSpec::Mode mode,
                                                   const std::vector<int>& levels) {
  cfg.validate();
  if (levels.empty()) throw ConfigError("sweep.levels: empty");
  if (!std::is_sorted(levels.begin(), levels.end()))
    throw ConfigError("sweep.levels: must be ascending");
  std::filesystem::create_directories(cfg.out_dir);

  std::vector<SweepRow> rows;
  for (std::size_t li = 0; li < levels.size(); ++li) {
    const int level = levels[li];
    if (level < 1) throw ConfigError("sweep.levels: must be positive");

    BagGenConfig bcfg = cfg.bags;
    DatasetSpec dspec = cfg.dataset;
    if (mode == SweepSpec::Mode::kVaryBagsFixedSize) {
      bcfg.num_bags = level;
      bcfg.allow_overlap = false;
    } else if (mode == SweepSpec::Mode::kVarySizeFixedBags) {
      bcfg.bag_size = level;
      bcfg.allow_overlap = false;
    } else {
      if (level < cfg.bags.num_bags)
        throw ConfigError("sweep.levels: overlap levels must be >= bags.num_bags");
      bcfg.allow_overlap = false;  // the initial bags are disjoint
    }
    if (dspec.kind == DatasetSpec::Kind::kBlobs && mode != SweepSpec::Mode::kVaryBagsOverlap) {
      // Headroom factor 2 covers the 20% holdout plus proportion skew.
      const long demand = static_cast<long>(bcfg.num_bags) * bcfg.bag_size;
      const int needed = static_cast<int>(2 * demand / dspec.num_classes + 1);
      dspec.per_class = std::max(dspec.per_class, needed);
    }
    Dataset ds = detail::build_dataset(dspec, cfg.seed);

    double acc_sum = 0.0;
    for (int fold = 0; fold < cfg.num_seeds; ++fold) {
      const std::uint64_t fold_seed = derive_seed(cfg.seed, 1000 + fold);
      detail::InstanceSplit split =
          detail::split_instances(ds, 0.2, derive_seed(fold_seed, detail::kStreamSplit));
      BagGenConfig fold_bcfg = bcfg;
      fold_bcfg.rng_seed = derive_seed(fold_seed, detail::kStreamBags);
      std::vector<Bag> bags = make_bags_from_pool(ds, split.pool, fold_bcfg);
      if (mode == SweepSpec::Mode::kVaryBagsOverlap && level > cfg.bags.num_bags) {
        std::set<int> covered;
        for (const Bag& b : bags) covered.insert(b.instance_ids.begin(), b.instance_ids.end());
        BagGenConfig extra_cfg = bcfg;
        extra_cfg.num_bags = level - cfg.bags.num_bags;
        extra_cfg.allow_overlap = true;
        extra_cfg.rng_seed = derive_seed(fold_seed, detail::kStreamExtraBags);
        std::vector<Bag> extra = make_bags_from_pool(
            ds, std::vector<int>(covered.begin(), covered.end()), extra_cfg);
        for (Bag& b : extra) bags.push_back(std::move(b));
      }
      acc_sum += detail::run_fold(ds, bags, cfg.train, fold_seed, split.test).accuracy;
    }
    rows.push_back({level, acc_sum / static_cast<double>(cfg.num_seeds)});
  }

  const char* name = mode == SweepSpec::Mode::kVaryBagsFixedSize
                         ? "vary_bags_fixed_size"
                         : (mode == SweepSpec::Mode::kVarySizeFixedBags ? "vary_size_fixed_bags"
                                                                        : "vary_bags_overlap");
  write_sweep_csv(rows, cfg.out_dir + "/sweep_" + name + ".csv");
  return rows;
}

// ---- analysis exports -------------------------------------------------------

// Random mixed bags over the given bag set: each draws a distinct parent
// pair and a gamma from the strategy.
inline std::vector<std::pair<Bag, MixedBagLabel>> generate_mixed_bags(
    const std::vector<Bag>& bags, int count, const GammaStrategy& strategy,
    const ConfidenceDegree& degree, std::uint64_t seed) {
  if (bags.size() < 2) throw std::invalid_argument("generate_mixed_bags: need at least 2 bags");
  Rng rng(seed);
  std::vector<std::pair<Bag, MixedBagLabel>> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    std::size_t ia = rng.uniform_int(bags.size());
    std::size_t ib = rng.uniform_int(bags.size() - 1);
    if (ib >= ia) ++ib;
    const double gamma = sample_gamma(strategy, rng);
    out.push_back(mix_bags(bags[ia], bags[ib], gamma, degree, rng,
                           {static_cast<int>(ia), static_cast<int>(ib)}));
  }
  return out;
}

// Projects all proportion vectors (original labels plus mixed expectations)
// to 2D by PCA and writes x,y,source rows. Returns the number of reliable
// components; fewer than 2 means the covariance was rank-deficient and the
// missing axes were zero-filled.
inline int export_proportion_scatter(const std::vector<Bag>& original_bags,
                                     const std::vector<MixedBagLabel>& mixed_labels,
                                     const std::string& out_path) {
  if (original_bags.size() < 3)
    throw std::invalid_argument("export_proportion_scatter: need at least 3 bags");
  std::vector<std::vector<double>> points;
  points.reserve(original_bags.size() + mixed_labels.size());
  for (const Bag& b : original_bags) points.push_back(b.label.values());
  for (const MixedBagLabel& m : mixed_labels) points.push_back(m.expected.values());
  Pca2 pca = pca2(points);

  std::ofstream out = detail::open_out(out_path, "export_proportion_scatter");
  out << "x,y,source\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto [x, y] = pca.project(points[i]);
    out << fmt_g17(x) << ',' << fmt_g17(y) << ','
        << (i < original_bags.size() ? "original" : "mixed") << '\n';
  }
  return pca.components_found;
}

// One row per mixed bag: L1 gap between the true (hidden-label) proportion
// and the expected one, against the L1 confidence width |alpha * sigma|.
inline void export_ci_gap_scatter(const Dataset& ds,
                                  const std::vector<std::pair<Bag, MixedBagLabel>>& mixed,
                                  const std::string& out_path) {
  std::ofstream out = detail::open_out(out_path, "export_ci_gap_scatter");
  out << "gap,width\n";
  for (const auto& [bag, label] : mixed) {
    ProportionVector truth = realized_histogram(ds, bag.instance_ids);
    double gap = 0.0, width = 0.0;
    for (std::size_t c = 0; c < label.expected.size(); ++c) {
      gap += std::fabs(truth[c] - label.expected[c]);
      width += label.alpha * label.sigma[c];
    }
    out << fmt_g17(gap) << ',' << fmt_g17(width) << '\n';
  }
}

}  // namespace mixbag
