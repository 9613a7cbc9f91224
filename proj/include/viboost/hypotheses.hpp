#pragma once

// Labeled datasets and the decision-stump hypothesis space.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "viboost/error.hpp"

namespace viboost {

/// N examples with D real features each (row-major), labels in {-1,+1} and,
/// for synthetic data, the ground-truth type selector of every label.
class Dataset {
 public:
  Dataset() = default;

  Dataset(std::size_t rows, std::size_t cols, std::vector<double> features, std::vector<int> labels,
          std::optional<std::vector<int>> true_types = std::nullopt)
      : rows_(rows),
        cols_(cols),
        features_(std::move(features)),
        labels_(std::move(labels)),
        true_types_(std::move(true_types)) {
    if (features_.size() != rows_ * cols_) {
      throw DomainError("Dataset: feature matrix is not rows x cols");
    }
    if (labels_.size() != rows_) throw DomainError("Dataset: one label per row is required");
    for (int y : labels_) {
      if (y != 1 && y != -1) throw DomainError("Dataset: labels must be +1 or -1");
    }
    if (true_types_) {
      if (true_types_->size() != rows_) throw DomainError("Dataset: one true type per row");
      for (int w : *true_types_) {
        if (w != 0 && w != 1) throw DomainError("Dataset: true types must be 0 or 1");
      }
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double at(std::size_t n, std::size_t d) const noexcept { return features_[n * cols_ + d]; }
  std::span<const double> row(std::size_t n) const noexcept {
    return {features_.data() + n * cols_, cols_};
  }
  const std::vector<double>& features() const noexcept { return features_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  int label(std::size_t n) const noexcept { return labels_[n]; }
  const std::optional<std::vector<int>>& true_types() const noexcept { return true_types_; }

  /// The examples at the given indices, in that order.
  Dataset subset(std::span<const std::size_t> indices) const {
    std::vector<double> f;
    f.reserve(indices.size() * cols_);
    std::vector<int> y;
    y.reserve(indices.size());
    std::optional<std::vector<int>> w;
    if (true_types_) w.emplace();
    for (std::size_t i : indices) {
      if (i >= rows_) throw DomainError("Dataset::subset: index out of range");
      const auto r = row(i);
      f.insert(f.end(), r.begin(), r.end());
      y.push_back(labels_[i]);
      if (w) w->push_back((*true_types_)[i]);
    }
    return Dataset(indices.size(), cols_, std::move(f), std::move(y), std::move(w));
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> features_;
  std::vector<int> labels_;
  std::optional<std::vector<int>> true_types_;
};

/// h(x) = +1 if x[feature] >= threshold, else -1. Single polarity only:
/// negated stumps are expressed through negative weights.
struct Stump {
  std::size_t feature = 0;
  double threshold = 0.0;

  int predict(std::span<const double> x) const noexcept {
    return x[feature] >= threshold ? 1 : -1;
  }

  friend bool operator==(const Stump&, const Stump&) = default;
};

struct StumpSpace {
  std::vector<Stump> stumps;
  /// Row-major M x N table of h_m(x_n) on the training examples.
  std::vector<std::int8_t> prediction_table;
  std::size_t examples = 0;

  std::size_t size() const noexcept { return stumps.size(); }

  std::span<const std::int8_t> row(std::size_t m) const noexcept {
    return {prediction_table.data() + m * examples, examples};
  }
  int prediction(std::size_t m, std::size_t n) const noexcept {
    return prediction_table[m * examples + n];
  }
};

/// Enumerates decision stumps over every feature.
///
/// Per non-constant feature: one threshold below the minimum (min - 1) and
/// one at each midpoint between consecutive distinct values. Stumps whose
/// prediction row duplicates or negates an earlier row are dropped, in
/// (feature, threshold) order.
inline StumpSpace build_stumps(const Dataset& data) {
  if (data.rows() == 0) throw DomainError("build_stumps: dataset is empty");
  const std::size_t n_rows = data.rows();
  StumpSpace space;
  space.examples = n_rows;

  // Canonical key: the row oriented so that its first entry is +1.
  std::unordered_set<std::string> seen;
  std::string key(n_rows, '\0');
  std::vector<std::int8_t> preds(n_rows);
  std::vector<double> values(n_rows);

  for (std::size_t d = 0; d < data.cols(); ++d) {
    for (std::size_t n = 0; n < n_rows; ++n) values[n] = data.at(n, d);
    std::vector<double> distinct = values;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2) continue;

    std::vector<double> thresholds;
    thresholds.reserve(distinct.size());
    thresholds.push_back(distinct.front() - 1.0);
    for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
      thresholds.push_back(0.5 * (distinct[i] + distinct[i + 1]));
    }

    for (double t : thresholds) {
      for (std::size_t n = 0; n < n_rows; ++n) preds[n] = values[n] >= t ? 1 : -1;
      const int flip = preds[0];
      for (std::size_t n = 0; n < n_rows; ++n) key[n] = static_cast<char>(preds[n] * flip);
      if (!seen.insert(key).second) continue;
      space.stumps.push_back({d, t});
      space.prediction_table.insert(space.prediction_table.end(), preds.begin(), preds.end());
    }
  }
  if (space.stumps.empty()) {
    throw DomainError("build_stumps: every feature is constant, no stump can split the data");
  }
  return space;
}

namespace detail {

inline void check_distribution(std::span<const double> d, std::size_t n) {
  if (d.size() != n) throw DomainError("weighted_error: distribution length does not match N");
  double total = 0.0;
  for (double v : d) {
    if (!(v >= 0.0)) throw DomainError("weighted_error: distribution entries must be >= 0");
    total += v;
  }
  if (std::fabs(total - 1.0) > 1e-9) throw DomainError("weighted_error: distribution must sum to 1");
}

}  // namespace detail

/// sum_n d_n 1{h(x_n) != y_n}
inline double weighted_error(const Stump& h, const Dataset& data, std::span<const double> d) {
  detail::check_distribution(d, data.rows());
  double eps = 0.0;
  for (std::size_t n = 0; n < data.rows(); ++n) {
    if (h.predict(data.row(n)) != data.label(n)) eps += d[n];
  }
  return eps;
}

/// Weighted error of a cached prediction row; no validation, for inner loops.
inline double weighted_error(std::span<const std::int8_t> predictions, std::span<const int> labels,
                             std::span<const double> d) noexcept {
  double eps = 0.0;
  for (std::size_t n = 0; n < predictions.size(); ++n) {
    if (predictions[n] != labels[n]) eps += d[n];
  }
  return eps;
}

struct Stage {
  double alpha = 0.0;
  std::size_t stump = 0;
};

using Ensemble = std::vector<Stage>;

/// H(x_n) = sum_t alpha_t h_t(x_n) for a training example.
inline double ensemble_margin(std::span<const Stage> ensemble, const StumpSpace& space,
                              std::size_t n) {
  if (n >= space.examples) throw DomainError("ensemble_margin: example index out of range");
  double h = 0.0;
  for (const auto& s : ensemble) {
    if (s.stump >= space.size()) throw DomainError("ensemble_margin: stump index out of range");
    h += s.alpha * space.prediction(s.stump, n);
  }
  return h;
}

/// H(x) for an arbitrary instance.
inline double ensemble_margin(std::span<const Stage> ensemble, const StumpSpace& space,
                              std::span<const double> x) {
  double h = 0.0;
  for (const auto& s : ensemble) h += s.alpha * space.stumps.at(s.stump).predict(x);
  return h;
}

/// Fraction of examples where sign(H(x)) (with sign(0) = +1) disagrees with the label.
inline double error_rate(std::span<const Stage> ensemble, const StumpSpace& space,
                         const Dataset& data) {
  if (data.rows() == 0) return 0.0;
  std::size_t wrong = 0;
  for (std::size_t n = 0; n < data.rows(); ++n) {
    const int pred = ensemble_margin(ensemble, space, data.row(n)) >= 0.0 ? 1 : -1;
    if (pred != data.label(n)) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(data.rows());
}

}  // namespace viboost
