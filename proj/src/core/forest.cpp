#include "core/forest.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <cmath>
#include <numeric>
#include <thread>

#include "core/error.hpp"

namespace kardashev::forest {

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& x, std::span<const double> y, const Hyperparams& hyper,
              Rng& rng)
      : x_(x), y_(y), hyper_(hyper), mtry_(hyper.resolved_mtry(x.cols())), rng_(rng) {
    features_.resize(x.cols());
  }

  Tree build(std::vector<std::size_t> rows) {
    tree_.nodes.clear();
    grow(std::move(rows), 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double sse = std::numeric_limits<double>::infinity();
  };

  std::int32_t grow(std::vector<std::size_t> rows, int depth) {
    const auto id = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    const std::size_t n = rows.size();

    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (auto r : rows) {
      sum += y_[r];
      lo = std::min(lo, y_[r]);
      hi = std::max(hi, y_[r]);
    }
    {
      Node& node = tree_.nodes[static_cast<std::size_t>(id)];
      node.value = sum / static_cast<double>(n);
      node.cover = static_cast<std::int64_t>(n);
    }

    const auto min_leaf = static_cast<std::size_t>(hyper_.min_leaf);
    const bool depth_capped = hyper_.max_depth > 0 && depth >= hyper_.max_depth;
    if (n < 2 * min_leaf || depth_capped || lo == hi) return id;

    const Split split = best_split(rows);
    if (split.feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (auto r : rows) {
      (x_(r, static_cast<std::size_t>(split.feature)) < split.threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    const auto l = grow(std::move(left), depth + 1);
    const auto rgt = grow(std::move(right), depth + 1);
    Node& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = rgt;
    return id;
  }

  Split best_split(const std::vector<std::size_t>& rows) {
    const std::size_t p = x_.cols();
    // Partial Fisher-Yates: the first mtry slots become the sample.
    std::iota(features_.begin(), features_.end(), 0);
    for (std::size_t i = 0; i < static_cast<std::size_t>(mtry_); ++i) {
      const auto j = i + static_cast<std::size_t>(uniform_index(rng_, p - i));
      std::swap(features_[i], features_[j]);
    }
    std::vector<std::size_t> sampled(features_.begin(), features_.begin() + mtry_);
    std::sort(sampled.begin(), sampled.end());

    const std::size_t n = rows.size();
    const auto min_leaf = static_cast<std::size_t>(hyper_.min_leaf);
    Split best;
    std::vector<std::pair<double, double>> pairs(n);
    for (std::size_t f : sampled) {
      for (std::size_t i = 0; i < n; ++i) pairs[i] = {x_(rows[i], f), y_[rows[i]]};
      std::stable_sort(pairs.begin(), pairs.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      double total_sum = 0.0, total_sq = 0.0;
      for (const auto& [xv, yv] : pairs) {
        total_sum += yv;
        total_sq += yv * yv;
      }
      double left_sum = 0.0, left_sq = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left_sum += pairs[i].second;
        left_sq += pairs[i].second * pairs[i].second;
        const std::size_t nl = i + 1;
        const std::size_t nr = n - nl;
        if (nl < min_leaf) continue;
        if (nr < min_leaf) break;
        const double a = pairs[i].first;
        const double b = pairs[i + 1].first;
        if (!(a < b)) continue;
        const double right_sum = total_sum - left_sum;
        const double right_sq = total_sq - left_sq;
        const double sse = (left_sq - left_sum * left_sum / static_cast<double>(nl)) +
                           (right_sq - right_sum * right_sum / static_cast<double>(nr));
        if (sse < best.sse) {
          double threshold = a + (b - a) / 2.0;
          if (!(threshold > a)) threshold = b;
          best = {static_cast<int>(f), threshold, sse};
        }
      }
    }
    return best;
  }

  const FeatureMatrix& x_;
  std::span<const double> y_;
  const Hyperparams& hyper_;
  int mtry_;
  Rng& rng_;
  std::vector<std::size_t> features_;
  Tree tree_;
};

}  // namespace

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
  FeatureMatrix out(rows.size(), cols_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

int Hyperparams::resolved_mtry(std::size_t p) const {
  if (mtry > 0) return mtry;
  return static_cast<int>((p + 2) / 3);
}

void Hyperparams::validate(std::size_t p) const {
  if (p == 0) throw ArgumentError("feature matrix has no columns");
  if (n_trees < 1) throw ArgumentError("n_trees must be at least 1");
  if (min_leaf < 1) throw ArgumentError("min_leaf must be at least 1");
  if (max_depth < 0) throw ArgumentError("max_depth must be non-negative");
  if (n_threads < 0) throw ArgumentError("n_threads must be non-negative");
  const int m = resolved_mtry(p);
  if (m < 1 || static_cast<std::size_t>(m) > p) {
    throw ArgumentError("mtry must lie in [1, " + std::to_string(p) + "]");
  }
}

double Tree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const Node& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left
                                                                                       : n.right);
  }
  return nodes[i].value;
}

int Tree::depth() const {
  std::vector<int> d(nodes.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, d[i]);
    if (!nodes[i].is_leaf()) {
      d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    }
  }
  return best;
}

double ForestModel::predict_row(std::span<const double> x) const {
  if (x.size() != feature_names.size()) {
    throw SchemaError("row has " + std::to_string(x.size()) + " features, model expects " +
                      std::to_string(feature_names.size()));
  }
  double sum = 0.0;
  for (const auto& t : trees) sum += t.predict(x);
  return sum / static_cast<double>(trees.size());
}

std::vector<double> ForestModel::predict(const FeatureMatrix& x) const {
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict_row(x.row(r));
  return out;
}

Rng tree_stream(std::uint64_t seed, std::size_t tree_index) {
  return derive_stream(seed, tree_index);
}

Tree fit_tree(const FeatureMatrix& x, std::span<const double> y, const Hyperparams& hyper,
              Rng& rng) {
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), 0);
  return fit_tree(x, y, rows, hyper, rng);
}

Tree fit_tree(const FeatureMatrix& x, std::span<const double> y,
              std::span<const std::size_t> rows, const Hyperparams& hyper, Rng& rng) {
  if (rows.empty() || x.rows() == 0) throw ArgumentError("cannot fit a tree on no rows");
  if (y.size() != x.rows()) throw ArgumentError("target length does not match row count");
  hyper.validate(x.cols());
  if (rows.size() < 2 * static_cast<std::size_t>(hyper.min_leaf)) {
    throw ArgumentError("need at least 2 * min_leaf rows to fit a tree");
  }
  TreeBuilder builder(x, y, hyper, rng);
  return builder.build({rows.begin(), rows.end()});
}

ForestModel fit_forest(const FeatureMatrix& x, std::span<const double> y,
                       std::vector<std::string> feature_names, const Hyperparams& hyper) {
  constexpr std::size_t kMinRows = 10;
  if (x.rows() < kMinRows) {
    throw ArgumentError("a forest needs at least " + std::to_string(kMinRows) + " rows, got " +
                        std::to_string(x.rows()));
  }
  if (y.size() != x.rows()) throw ArgumentError("target length does not match row count");
  if (feature_names.size() != x.cols()) {
    throw ArgumentError("feature name count does not match column count");
  }
  hyper.validate(x.cols());

  const std::size_t n = x.rows();
  const auto n_trees = static_cast<std::size_t>(hyper.n_trees);
  ForestModel model;
  model.hyper = hyper;
  model.feature_names = std::move(feature_names);
  model.trees.resize(n_trees);
  std::vector<std::vector<std::uint32_t>> in_bag(n_trees);

  auto train_one = [&](std::size_t t) {
    Rng rng = tree_stream(hyper.seed, t);
    std::vector<std::size_t> rows(n);
    std::vector<std::uint32_t> counts(n, 0);
    if (hyper.bootstrap) {
      for (auto& r : rows) {
        r = static_cast<std::size_t>(uniform_index(rng, n));
        ++counts[r];
      }
    } else {
      std::iota(rows.begin(), rows.end(), 0);
      std::fill(counts.begin(), counts.end(), 1u);
    }
    model.trees[t] = fit_tree(x, y, rows, hyper, rng);
    in_bag[t] = std::move(counts);
  };

  unsigned workers = hyper.n_threads > 0 ? static_cast<unsigned>(hyper.n_threads)
                                         : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_trees));
  if (workers <= 1) {
    for (std::size_t t = 0; t < n_trees; ++t) train_one(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t; (t = next.fetch_add(1)) < n_trees;) {
          try {
            train_one(t);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
            return;
          }
        }
      });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }

  // Out-of-bag error, accumulated in tree order so it is scheduling-independent.
  double sse = 0.0;
  std::size_t covered = 0;
  for (std::size_t r = 0; r < n; ++r) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t t = 0; t < n_trees; ++t) {
      if (in_bag[t][r] == 0) {
        sum += model.trees[t].predict(x.row(r));
        ++count;
      }
    }
    if (count > 0) {
      const double err = sum / static_cast<double>(count) - y[r];
      sse += err * err;
      ++covered;
    }
  }
  if (covered > 0) model.oob_rmse = std::sqrt(sse / static_cast<double>(covered));
  return model;
}

double predict(const ForestModel& model, const FeatureVector& x) {
  std::vector<double> row;
  row.reserve(model.feature_names.size());
  for (const auto& name : model.feature_names) row.push_back(x.get(name));
  return model.predict_row(row);
}

Metrics compute_metrics(std::span<const double> predictions, std::span<const double> targets) {
  if (targets.empty()) throw ArgumentError("cannot evaluate on an empty set");
  if (predictions.size() != targets.size()) {
    throw ArgumentError("prediction and target lengths differ");
  }
  const double n = static_cast<double>(targets.size());
  const double mean = std::accumulate(targets.begin(), targets.end(), 0.0) / n;
  double sse = 0.0, sst = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    sse += (predictions[i] - targets[i]) * (predictions[i] - targets[i]);
    sst += (targets[i] - mean) * (targets[i] - mean);
  }
  if (!(sst > 0.0)) throw DomainError("R^2 is undefined for constant targets");
  return {1.0 - sse / sst, std::sqrt(sse / n)};
}

Metrics evaluate(const ForestModel& model, const FeatureMatrix& x, std::span<const double> y) {
  if (x.rows() != y.size()) throw ArgumentError("target length does not match row count");
  return compute_metrics(model.predict(x), y);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_holdout(
    std::size_t n_rows, double holdout_fraction, std::uint64_t seed) {
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    throw ArgumentError("holdout fraction must lie in (0, 1)");
  }
  const auto n_test =
      static_cast<std::size_t>(std::llround(static_cast<double>(n_rows) * holdout_fraction));
  if (n_test == 0 || n_test >= n_rows) {
    throw ArgumentError("holdout fraction leaves an empty training or test set");
  }
  std::vector<std::size_t> perm(n_rows);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng = derive_stream(seed, 0xF00DULL);
  for (std::size_t i = n_rows - 1; i > 0; --i) {
    std::swap(perm[i], perm[static_cast<std::size_t>(uniform_index(rng, i + 1))]);
  }
  std::vector<std::size_t> test(perm.begin(), perm.begin() + static_cast<long>(n_test));
  std::vector<std::size_t> train(perm.begin() + static_cast<long>(n_test), perm.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {train, test};
}

}  // namespace kardashev::forest
