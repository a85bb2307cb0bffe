#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixbag/bag.hpp"
#include "mixbag/model.hpp"
#include "mixbag/train.hpp"

namespace mixbag {

// Doubles are written with 17 significant digits so a reader recovers the
// exact bit pattern.
inline std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  return h;
}

namespace detail {

inline void append_double_array(std::ostream& os, const std::vector<double>& v) {
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    os << fmt_g17(v[i]);
  }
  os << ']';
}

inline void append_int_array(std::ostream& os, const std::vector<int>& v) {
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    os << v[i];
  }
  os << ']';
}

inline std::ofstream open_out(const std::string& path, const char* who) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(std::string(who) + ": cannot open " + path);
  return out;
}

}  // namespace detail

// ---- bags -------------------------------------------------------------

inline void write_bags_json(const std::vector<Bag>& bags, const std::string& path) {
  std::ofstream out = detail::open_out(path, "write_bags_json");
  out << "[\n";
  for (std::size_t i = 0; i < bags.size(); ++i) {
    out << "  {\"instance_ids\":";
    detail::append_int_array(out, bags[i].instance_ids);
    out << ",\"label\":";
    detail::append_double_array(out, bags[i].label.values());
    out << '}' << (i + 1 < bags.size() ? "," : "") << '\n';
  }
  out << "]\n";
}

inline std::vector<Bag> read_bags_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_bags_json: cannot open " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  std::vector<Bag> bags;
  for (const auto& item : j) {
    bags.emplace_back(item.at("instance_ids").get<std::vector<int>>(),
                      ProportionVector(item.at("label").get<std::vector<double>>()));
  }
  return bags;
}

// ---- mixed labels -----------------------------------------------------

inline void append_mixed_label_json(std::ostream& os, const MixedBagLabel& label) {
  os << "{\"expected\":";
  detail::append_double_array(os, label.expected.values());
  os << ",\"sigma\":";
  detail::append_double_array(os, label.sigma);
  os << ",\"alpha\":" << fmt_g17(label.alpha) << ",\"gamma\":" << fmt_g17(label.gamma)
     << ",\"parent_ids\":[" << label.parent_ids.first << ',' << label.parent_ids.second << "]}";
}

inline void write_mixed_labels_json(const std::vector<MixedBagLabel>& labels,
                                    const std::string& path) {
  std::ofstream out = detail::open_out(path, "write_mixed_labels_json");
  out << "[\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << "  ";
    append_mixed_label_json(out, labels[i]);
    out << (i + 1 < labels.size() ? "," : "") << '\n';
  }
  out << "]\n";
}

inline MixedBagLabel mixed_label_from_json(const nlohmann::json& j) {
  MixedBagLabel label;
  label.expected = ProportionVector(j.at("expected").get<std::vector<double>>());
  label.sigma = j.at("sigma").get<std::vector<double>>();
  label.alpha = j.at("alpha").get<double>();
  label.gamma = j.at("gamma").get<double>();
  auto pids = j.at("parent_ids").get<std::vector<int>>();
  if (pids.size() != 2) throw std::runtime_error("mixed label: parent_ids must have 2 entries");
  label.parent_ids = {pids[0], pids[1]};
  label.validate();
  return label;
}

inline std::vector<MixedBagLabel> read_mixed_labels_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_mixed_labels_json: cannot open " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  std::vector<MixedBagLabel> labels;
  for (const auto& item : j) labels.push_back(mixed_label_from_json(item));
  return labels;
}

// ---- model checkpoints --------------------------------------------------

inline void write_checkpoint(const ModelParams& params, const std::string& path) {
  std::ofstream out = detail::open_out(path, "write_checkpoint");
  out << "{\"architecture\":\"" << (params.arch == Architecture::kLinear ? "linear" : "mlp")
      << "\",\"feature_dim\":" << params.feature_dim
      << ",\"num_classes\":" << params.num_classes << ",\"hidden\":" << params.hidden
      << ",\"theta\":";
  detail::append_double_array(out, params.theta);
  out << "}\n";
}

inline ModelParams read_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_checkpoint: cannot open " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  ModelParams p;
  const std::string arch = j.at("architecture").get<std::string>();
  if (arch == "linear") p.arch = Architecture::kLinear;
  else if (arch == "mlp") p.arch = Architecture::kMlp;
  else throw std::runtime_error("read_checkpoint: unknown architecture '" + arch + "'");
  p.feature_dim = j.at("feature_dim").get<int>();
  p.num_classes = j.at("num_classes").get<int>();
  p.hidden = j.at("hidden").get<int>();
  p.theta = j.at("theta").get<std::vector<double>>();
  if (p.theta.size() != p.param_count())
    throw std::runtime_error("read_checkpoint: theta size does not match architecture");
  return p;
}

// ---- train log ----------------------------------------------------------

inline void write_trainlog_csv(const TrainLog& log, const std::string& path) {
  std::ofstream out = detail::open_out(path, "write_trainlog_csv");
  out << "epoch,train_loss,val_loss,gate_off_fraction\n";
  for (const EpochStats& e : log.epochs)
    out << e.epoch << ',' << fmt_g17(e.train_loss) << ',' << fmt_g17(e.val_loss) << ','
        << fmt_g17(e.gate_off_fraction) << '\n';
}

}  // namespace mixbag
