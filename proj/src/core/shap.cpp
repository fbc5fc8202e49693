#include "core/shap.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <exception>
#include <numeric>
#include <ostream>
#include <thread>

#include "core/error.hpp"
#include "core/format.hpp"

namespace kardashev::shap {

namespace {

using forest::ForestModel;
using forest::Node;
using forest::Tree;

double expectation_at(const Tree& tree, std::size_t index, std::span<const double> x,
                      std::uint64_t known) {
  const Node& node = tree.nodes[index];
  if (node.cover <= 0) throw ModelIntegrityError("tree node with zero cover");
  if (node.is_leaf()) return node.value;
  const auto f = static_cast<std::size_t>(node.feature);
  const auto left = static_cast<std::size_t>(node.left);
  const auto right = static_cast<std::size_t>(node.right);
  if (known >> f & 1u) {
    return expectation_at(tree, x[f] < node.threshold ? left : right, x, known);
  }
  const double cl = static_cast<double>(tree.nodes[left].cover);
  const double cr = static_cast<double>(tree.nodes[right].cover);
  return (cl * expectation_at(tree, left, x, known) + cr * expectation_at(tree, right, x, known)) /
         static_cast<double>(node.cover);
}

void check_width(const ForestModel& model, std::span<const double> x) {
  if (x.size() != model.n_features()) {
    throw SchemaError("row has " + std::to_string(x.size()) + " features, model expects " +
                      std::to_string(model.n_features()));
  }
  if (model.trees.empty()) throw ModelIntegrityError("forest has no trees");
}

// Shapley weight |S|! (p - |S| - 1)! / p! = 1 / (p * C(p - 1, |S|)).
std::vector<double> coalition_weights(std::size_t p) {
  std::vector<double> w(p);
  double binom = 1.0;  // C(p - 1, s)
  for (std::size_t s = 0; s < p; ++s) {
    w[s] = 1.0 / (static_cast<double>(p) * binom);
    binom = binom * static_cast<double>(p - 1 - s) / static_cast<double>(s + 1);
  }
  return w;
}

// Path algorithm state: one entry per unique feature on the current path.
struct PathElement {
  int feature = -1;
  double zero_fraction = 0.0;  // share of covers flowing this way
  double one_fraction = 0.0;   // 1 if x follows this way, else 0
  double weight = 0.0;
};

void extend_path(PathElement* path, std::size_t depth, double zero_fraction,
                 double one_fraction, int feature) {
  path[depth] = {feature, zero_fraction, one_fraction, depth == 0 ? 1.0 : 0.0};
  const double d1 = static_cast<double>(depth + 1);
  for (std::size_t i = depth; i-- > 0;) {
    path[i + 1].weight += one_fraction * path[i].weight * static_cast<double>(i + 1) / d1;
    path[i].weight = zero_fraction * path[i].weight * static_cast<double>(depth - i) / d1;
  }
}

void unwind_path(PathElement* path, std::size_t depth, std::size_t index) {
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  const double d1 = static_cast<double>(depth + 1);
  double next = path[depth].weight;
  for (std::size_t i = depth; i-- > 0;) {
    if (one != 0.0) {
      const double tmp = path[i].weight;
      path[i].weight = next * d1 / (static_cast<double>(i + 1) * one);
      next = tmp - path[i].weight * zero * static_cast<double>(depth - i) / d1;
    } else {
      path[i].weight = path[i].weight * d1 / (zero * static_cast<double>(depth - i));
    }
  }
  for (std::size_t i = index; i < depth; ++i) {
    path[i].feature = path[i + 1].feature;
    path[i].zero_fraction = path[i + 1].zero_fraction;
    path[i].one_fraction = path[i + 1].one_fraction;
  }
}

double unwound_sum(const PathElement* path, std::size_t depth, std::size_t index) {
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  const double d1 = static_cast<double>(depth + 1);
  double next = path[depth].weight;
  double total = 0.0;
  for (std::size_t i = depth; i-- > 0;) {
    if (one != 0.0) {
      const double tmp = next * d1 / (static_cast<double>(i + 1) * one);
      total += tmp;
      next = path[i].weight - tmp * zero * static_cast<double>(depth - i) / d1;
    } else if (zero != 0.0) {
      total += path[i].weight / zero / (static_cast<double>(depth - i) / d1);
    }
  }
  return total;
}

class PathExplainer {
 public:
  PathExplainer(const Tree& tree, std::span<const double> x, std::span<double> phi)
      : tree_(tree), x_(x), phi_(phi) {
    const auto d = static_cast<std::size_t>(tree.depth()) + 2;
    arena_.resize(d * (d + 1) / 2);
  }

  void run() { recurse(0, arena_.data(), 0, 1.0, 1.0, -1); }

 private:
  void recurse(std::size_t index, PathElement* parent_path, std::size_t depth,
               double zero_fraction, double one_fraction, int feature) {
    const Node& node = tree_.nodes[index];
    if (node.cover <= 0) throw ModelIntegrityError("tree node with zero cover");
    // Each level works on its own copy placed after the parent's segment.
    PathElement* path = parent_path + depth;
    if (depth > 0) std::copy(parent_path, parent_path + depth, path);
    extend_path(path, depth, zero_fraction, one_fraction, feature);

    if (node.is_leaf()) {
      for (std::size_t i = 1; i <= depth; ++i) {
        const double w = unwound_sum(path, depth, i);
        const PathElement& el = path[i];
        phi_[static_cast<std::size_t>(el.feature)] +=
            w * (el.one_fraction - el.zero_fraction) * node.value;
      }
      return;
    }

    const auto f = static_cast<std::size_t>(node.feature);
    const bool go_left = x_[f] < node.threshold;
    const auto hot = static_cast<std::size_t>(go_left ? node.left : node.right);
    const auto cold = static_cast<std::size_t>(go_left ? node.right : node.left);
    const double cover = static_cast<double>(node.cover);
    const double hot_zero = static_cast<double>(tree_.nodes[hot].cover) / cover;
    const double cold_zero = static_cast<double>(tree_.nodes[cold].cover) / cover;

    double incoming_zero = 1.0;
    double incoming_one = 1.0;
    std::size_t unique_depth = depth;
    for (std::size_t k = 1; k <= depth; ++k) {
      if (path[k].feature == node.feature) {
        incoming_zero = path[k].zero_fraction;
        incoming_one = path[k].one_fraction;
        unwind_path(path, depth, k);
        --unique_depth;
        break;
      }
    }
    recurse(hot, path, unique_depth + 1, hot_zero * incoming_zero, incoming_one, node.feature);
    recurse(cold, path, unique_depth + 1, cold_zero * incoming_zero, 0.0, node.feature);
  }

  const Tree& tree_;
  std::span<const double> x_;
  std::span<double> phi_;
  std::vector<PathElement> arena_;
};

}  // namespace

double tree_expectation(const Tree& tree, std::span<const double> x, std::uint64_t known) {
  if (tree.nodes.empty()) throw ModelIntegrityError("empty tree");
  return expectation_at(tree, 0, x, known);
}

double coalition_value(const ForestModel& model, std::span<const double> x, std::uint64_t known) {
  check_width(model, x);
  double sum = 0.0;
  for (const auto& t : model.trees) sum += tree_expectation(t, x, known);
  return sum / static_cast<double>(model.trees.size());
}

Attribution shapley_exact(const ForestModel& model, std::span<const double> x) {
  check_width(model, x);
  const std::size_t p = model.n_features();
  if (p > kMaxExactFeatures) {
    throw CapabilityError("exact Shapley enumeration supports at most " +
                          std::to_string(kMaxExactFeatures) + " features, model has " +
                          std::to_string(p) + "; explain a sub-sample of the features instead");
  }
  const std::size_t n_masks = std::size_t{1} << p;

  // v(S) only depends on S through the features a tree actually splits on,
  // so each tree is tabulated over its own feature subset.
  std::vector<double> value(n_masks, 0.0);
  std::vector<double> table;
  for (const auto& tree : model.trees) {
    std::vector<std::size_t> used;
    for (const auto& node : tree.nodes) {
      if (!node.is_leaf()) used.push_back(static_cast<std::size_t>(node.feature));
    }
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    const std::size_t local = std::size_t{1} << used.size();
    table.assign(local, 0.0);
    for (std::size_t m = 0; m < local; ++m) {
      std::uint64_t known = 0;
      for (std::size_t b = 0; b < used.size(); ++b) {
        if (m >> b & 1u) known |= std::uint64_t{1} << used[b];
      }
      table[m] = tree_expectation(tree, x, known);
    }
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
      std::size_t m = 0;
      for (std::size_t b = 0; b < used.size(); ++b) {
        if (mask >> used[b] & 1u) m |= std::size_t{1} << b;
      }
      value[mask] += table[m];
    }
  }
  const double n_trees = static_cast<double>(model.trees.size());
  for (double& v : value) v /= n_trees;

  const auto weight = coalition_weights(p);
  Attribution out;
  out.phi.assign(p, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    double phi = 0.0;
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
      if (mask & bit) continue;
      phi += weight[static_cast<std::size_t>(std::popcount(mask))] * (value[mask | bit] - value[mask]);
    }
    out.phi[i] = phi;
  }
  out.base_value = value[0];
  out.prediction = model.predict_row(x);
  return out;
}

Attribution shapley_tree_path(const ForestModel& model, std::span<const double> x) {
  check_width(model, x);
  const std::size_t p = model.n_features();
  Attribution out;
  out.phi.assign(p, 0.0);
  std::vector<double> tree_phi(p);
  double base = 0.0;
  for (const auto& tree : model.trees) {
    std::fill(tree_phi.begin(), tree_phi.end(), 0.0);
    PathExplainer(tree, x, tree_phi).run();
    for (std::size_t i = 0; i < p; ++i) out.phi[i] += tree_phi[i];
    base += tree_expectation(tree, x, 0);
  }
  const double n_trees = static_cast<double>(model.trees.size());
  for (double& v : out.phi) v /= n_trees;
  out.base_value = base / n_trees;
  out.prediction = model.predict_row(x);
  return out;
}

SummaryRanking summarize(const ForestModel& model, const forest::FeatureMatrix& data,
                         int n_threads, bool exact) {
  if (data.rows() == 0) throw ArgumentError("cannot summarize attributions over an empty dataset");
  if (data.cols() != model.n_features()) {
    throw SchemaError("dataset has " + std::to_string(data.cols()) + " features, model expects " +
                      std::to_string(model.n_features()));
  }
  const std::size_t p = model.n_features();
  const std::size_t n = data.rows();
  if (exact && p > kMaxExactFeatures) {
    throw CapabilityError("exact attribution supports at most " +
                          std::to_string(kMaxExactFeatures) + " features, model has " +
                          std::to_string(p) + "; use the path method instead");
  }
  std::vector<double> abs_phi(n * p);

  auto explain_row = [&](std::size_t r) {
    const auto a =
        exact ? shapley_exact(model, data.row(r)) : shapley_tree_path(model, data.row(r));
    for (std::size_t i = 0; i < p; ++i) abs_phi[r * p + i] = std::abs(a.phi[i]);
  };
  unsigned workers = n_threads > 0 ? static_cast<unsigned>(n_threads)
                                   : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t r = 0; r < n; ++r) explain_row(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr failure;
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (std::size_t r; (r = next.fetch_add(1)) < n;) {
            try {
              explain_row(r);
            } catch (...) {
              if (!failed.exchange(true)) failure = std::current_exception();
              return;
            }
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  SummaryRanking ranking(p);
  for (std::size_t i = 0; i < p; ++i) {
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) sum += abs_phi[r * p + i];
    ranking[i].name = model.feature_names[i];
    ranking[i].mean_abs = sum / static_cast<double>(n);
  }
  std::sort(ranking.begin(), ranking.end(), [](const auto& a, const auto& b) {
    if (a.mean_abs != b.mean_abs) return a.mean_abs > b.mean_abs;
    return a.name < b.name;
  });
  for (std::size_t i = 0; i < p; ++i) ranking[i].rank = static_cast<int>(i + 1);
  return ranking;
}

void write_summary_csv(std::ostream& out, const SummaryRanking& ranking,
                       const std::string& header_comment) {
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  out << "feature,mean_abs_shap,rank\n";
  for (const auto& r : ranking) {
    out << r.name << ',' << format_double(r.mean_abs) << ',' << r.rank << '\n';
  }
}

}  // namespace kardashev::shap
