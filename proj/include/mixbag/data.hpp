#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixbag/rng.hpp"

namespace mixbag {

// A feature vector with an optional ground-truth class (-1 = unknown).
// True classes are used only for bag construction and evaluation; loss code
// never sees them.
struct Instance {
  std::vector<double> features;
  int true_class = -1;

  bool has_label() const { return true_class >= 0; }
};

// A probability vector over classes: entries in [0,1], sum within 1e-9 of 1.
class ProportionVector {
 public:
  static constexpr double kSumTolerance = 1e-9;

  ProportionVector() = default;

  explicit ProportionVector(std::vector<double> values) : p_(std::move(values)) {
    if (p_.empty()) throw std::invalid_argument("ProportionVector: empty");
    double sum = 0.0;
    for (double v : p_) {
      if (!(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument("ProportionVector: entry outside [0,1]");
      sum += v;
    }
    if (std::fabs(sum - 1.0) > kSumTolerance)
      throw std::invalid_argument("ProportionVector: entries do not sum to 1");
  }

  const std::vector<double>& values() const { return p_; }
  double operator[](std::size_t c) const { return p_[c]; }
  std::size_t size() const { return p_.size(); }

 private:
  std::vector<double> p_;
};

struct Dataset {
  std::vector<Instance> instances;
  int num_classes = 0;
  int feature_dim = 0;

  std::size_t size() const { return instances.size(); }

  // Indices of all instances of class c.
  std::vector<int> indices_of_class(int c) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < instances.size(); ++i)
      if (instances[i].true_class == c) out.push_back(static_cast<int>(i));
    return out;
  }
};

namespace detail {

inline double parse_double_strict(const std::string& tok, const std::string& where) {
  const char* s = tok.c_str();
  char* end = nullptr;
  double v = std::strtod(s, &end);
  if (end == s || *end != '\0' || !std::isfinite(v))
    throw std::runtime_error(where + ": not a number: '" + tok + "'");
  return v;
}

inline long parse_long_strict(const std::string& tok, const std::string& where) {
  const char* s = tok.c_str();
  char* end = nullptr;
  long v = std::strtol(s, &end, 10);
  if (end == s || *end != '\0')
    throw std::runtime_error(where + ": not an integer: '" + tok + "'");
  return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace detail

// Loads a dataset from CSV: D feature columns followed by one integer label
// column in [0, num_classes) or -1 for unlabeled. No header by default;
// skip_header drops the first line. Errors name the offending line.
inline Dataset load_csv(const std::string& path, int num_classes, bool skip_header = false) {
  if (num_classes < 2) throw std::invalid_argument("load_csv: num_classes must be >= 2");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open " + path);

  Dataset ds;
  ds.num_classes = num_classes;
  std::string line;
  std::size_t line_no = 0;
  if (skip_header && std::getline(in, line)) ++line_no;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    std::vector<std::string> fields = detail::split_csv_line(line);
    if (fields.size() < 2) throw std::runtime_error(where + ": expected features and a label");
    if (ds.feature_dim == 0) {
      ds.feature_dim = static_cast<int>(fields.size()) - 1;
    } else if (static_cast<int>(fields.size()) != ds.feature_dim + 1) {
      throw std::runtime_error(where + ": expected " + std::to_string(ds.feature_dim + 1) +
                               " columns, got " + std::to_string(fields.size()));
    }
    Instance ins;
    ins.features.reserve(ds.feature_dim);
    for (int d = 0; d < ds.feature_dim; ++d)
      ins.features.push_back(detail::parse_double_strict(fields[d], where));
    long label = detail::parse_long_strict(fields.back(), where);
    if (label < -1 || label >= num_classes)
      throw std::runtime_error(where + ": label " + std::to_string(label) +
                               " out of range for " + std::to_string(num_classes) + " classes");
    ins.true_class = static_cast<int>(label);
    ds.instances.push_back(std::move(ins));
  }
  if (ds.instances.empty()) throw std::runtime_error("load_csv: no rows in " + path);
  return ds;
}

// Writes a dataset in the load_csv format, features at 17 significant digits
// so that load -> save -> load round-trips values exactly.
inline void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_csv: cannot open " + path);
  char buf[64];
  for (const Instance& ins : ds.instances) {
    for (double v : ins.features) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << buf << ',';
    }
    out << ins.true_class << '\n';
  }
  if (!out) throw std::runtime_error("save_csv: write failed for " + path);
}

// Synthetic Gaussian-blob dataset: class c is an isotropic Gaussian with the
// given spread around a unit axis vertex (+e_c for c < dim, -e_{c-dim}
// otherwise), so classes are linearly separable when the spread is small.
inline Dataset make_blobs(int num_classes, int per_class, int dim, double spread, Rng& rng) {
  if (num_classes < 2) throw std::invalid_argument("make_blobs: num_classes must be >= 2");
  if (per_class < 1) throw std::invalid_argument("make_blobs: per_class must be >= 1");
  if (dim < 1) throw std::invalid_argument("make_blobs: dim must be >= 1");
  if (!(spread > 0.0)) throw std::invalid_argument("make_blobs: spread must be > 0");
  if (num_classes > 2 * dim)
    throw std::invalid_argument("make_blobs: axis placement supports at most 2*dim classes");

  Dataset ds;
  ds.num_classes = num_classes;
  ds.feature_dim = dim;
  ds.instances.reserve(static_cast<std::size_t>(num_classes) * per_class);
  for (int c = 0; c < num_classes; ++c) {
    const int axis = c % dim;
    const double sign = c < dim ? 1.0 : -1.0;
    for (int i = 0; i < per_class; ++i) {
      Instance ins;
      ins.features.resize(dim);
      for (int d = 0; d < dim; ++d) ins.features[d] = rng.normal(0.0, spread);
      ins.features[axis] += sign;
      ins.true_class = c;
      ds.instances.push_back(std::move(ins));
    }
  }
  return ds;
}

}  // namespace mixbag
