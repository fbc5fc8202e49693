#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "core/features.hpp"
#include "core/random.hpp"

namespace kardashev::forest {

// Dense row-major matrix of driver values, one row per country-year.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Hyperparams {
  int n_trees = 500;
  int mtry = 0;       // 0 selects ceil(p / 3)
  int min_leaf = 2;
  int max_depth = 0;  // 0 means unlimited
  std::uint64_t seed = 42;
  bool bootstrap = true;  // false trains every tree on all rows (testing)
  int n_threads = 0;      // 0 uses the hardware concurrency; no effect on results

  // mtry with the default applied for p features. Throws ArgumentError when
  // the hyperparameters are inconsistent with p.
  int resolved_mtry(std::size_t p) const;
  void validate(std::size_t p) const;
};

// Flattened tree node. Leaves have feature == -1. Rows with
// x[feature] < threshold go left.
struct Node {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;       // mean target of the rows routed here
  std::int64_t cover = 0;   // training rows (with bootstrap multiplicity)

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const Node&, const Node&) = default;
};

struct Tree {
  std::vector<Node> nodes;  // nodes[0] is the root

  double predict(std::span<const double> x) const;
  int depth() const;
  friend bool operator==(const Tree&, const Tree&) = default;
};

struct ForestModel {
  std::vector<Tree> trees;
  Hyperparams hyper;
  double oob_rmse = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> feature_names;

  std::size_t n_features() const noexcept { return feature_names.size(); }
  double predict_row(std::span<const double> x) const;
  std::vector<double> predict(const FeatureMatrix& x) const;
};

struct Metrics {
  double r2 = 0.0;
  double rmse = 0.0;
};

// Per-tree random stream; the bootstrap draws come first, then the feature
// sampling of fit_tree.
Rng tree_stream(std::uint64_t seed, std::size_t tree_index);

// Greedy CART on all rows.
Tree fit_tree(const FeatureMatrix& x, std::span<const double> y, const Hyperparams& hyper,
              Rng& rng);

// Greedy CART on a multiset of row indices.
Tree fit_tree(const FeatureMatrix& x, std::span<const double> y,
              std::span<const std::size_t> rows, const Hyperparams& hyper, Rng& rng);

ForestModel fit_forest(const FeatureMatrix& x, std::span<const double> y,
                       std::vector<std::string> feature_names, const Hyperparams& hyper);

// Resolves the model's features by name. Throws SchemaError for a feature the
// vector does not carry.
double predict(const ForestModel& model, const FeatureVector& x);

Metrics compute_metrics(std::span<const double> predictions, std::span<const double> targets);
Metrics evaluate(const ForestModel& model, const FeatureMatrix& x, std::span<const double> y);

// Seeded random row holdout: {train indices, test indices}, each sorted.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_holdout(
    std::size_t n_rows, double holdout_fraction, std::uint64_t seed);

}  // namespace kardashev::forest
