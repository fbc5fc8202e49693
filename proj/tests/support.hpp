#pragma once

// Simulators and independent reference implementations shared by the tests
// and the acceptance runner. Nothing here calls into the code under test
// except for the Rng helpers and plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "core/forest.hpp"
#include "core/random.hpp"

namespace kd_test {

using kardashev::Rng;

inline std::vector<double> simulate_ar1(double phi, int n, std::uint64_t seed) {
  Rng rng = kardashev::derive_stream(seed, 0);
  std::vector<double> v(static_cast<std::size_t>(n));
  double x = 0.0;
  for (auto& e : v) {
    x = phi * x + kardashev::standard_normal(rng);
    e = x;
  }
  return v;
}

inline std::vector<double> simulate_ma1(double theta, int n, std::uint64_t seed) {
  Rng rng = kardashev::derive_stream(seed, 0);
  std::vector<double> v(static_cast<std::size_t>(n));
  double prev = kardashev::standard_normal(rng);
  for (auto& e : v) {
    const double cur = kardashev::standard_normal(rng);
    e = cur + theta * prev;
    prev = cur;
  }
  return v;
}

inline std::vector<double> simulate_random_walk(int n, std::uint64_t seed) {
  Rng rng = kardashev::derive_stream(seed, 0);
  std::vector<double> v(static_cast<std::size_t>(n));
  double x = 0.0;
  for (auto& e : v) {
    x += kardashev::standard_normal(rng);
    e = x;
  }
  return v;
}

inline std::vector<double> white_noise(int n, std::uint64_t seed) {
  Rng rng = kardashev::derive_stream(seed, 0);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& e : v) e = kardashev::standard_normal(rng);
  return v;
}

// Best (threshold, sse) for one feature by trying every midpoint and
// recomputing both child sums of squares from scratch.
struct BruteSplit {
  double threshold = 0.0;
  double sse = std::numeric_limits<double>::infinity();
};

inline BruteSplit brute_best_split(const std::vector<double>& x, const std::vector<double>& y,
                                   std::size_t min_leaf) {
  std::vector<double> values = x;
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  BruteSplit best;
  for (std::size_t k = 0; k + 1 < values.size(); ++k) {
    const double t = (values[k] + values[k + 1]) / 2.0;
    std::vector<double> l, r;
    for (std::size_t i = 0; i < x.size(); ++i) (x[i] < t ? l : r).push_back(y[i]);
    if (l.size() < min_leaf || r.size() < min_leaf) continue;
    auto sse = [](const std::vector<double>& v) {
      const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      double s = 0.0;
      for (double e : v) s += (e - m) * (e - m);
      return s;
    };
    const double total = sse(l) + sse(r);
    if (std::isinf(best.sse) || total < best.sse - 1e-9 * (1.0 + std::abs(best.sse))) best = {t, total};
  }
  return best;
}

// v(S) for one tree by walking every root-to-leaf path: a leaf contributes
// its value times the product, over the path, of 1/0 for known features and
// the child's cover share for unknown ones.
inline double leaf_enum_value(const kardashev::forest::Tree& tree, const std::vector<double>& x,
                              std::uint64_t known) {
  struct Item {
    std::size_t node;
    double weight;
  };
  double total = 0.0;
  std::vector<Item> stack{{0, 1.0}};
  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    const auto& n = tree.nodes[it.node];
    if (n.is_leaf()) {
      total += it.weight * n.value;
      continue;
    }
    const auto l = static_cast<std::size_t>(n.left);
    const auto r = static_cast<std::size_t>(n.right);
    if (known >> n.feature & 1U) {
      const bool go_left = x[static_cast<std::size_t>(n.feature)] < n.threshold;
      stack.push_back({go_left ? l : r, it.weight});
    } else {
      const double c = static_cast<double>(n.cover);
      stack.push_back({l, it.weight * static_cast<double>(tree.nodes[l].cover) / c});
      stack.push_back({r, it.weight * static_cast<double>(tree.nodes[r].cover) / c});
    }
  }
  return total;
}

inline double forest_value(const kardashev::forest::ForestModel& m, const std::vector<double>& x,
                           std::uint64_t known) {
  double s = 0.0;
  for (const auto& t : m.trees) s += leaf_enum_value(t, x, known);
  return s / static_cast<double>(m.trees.size());
}

// Shapley values as the average marginal contribution over all p! orderings.
inline std::vector<double> permutation_shapley(const kardashev::forest::ForestModel& m,
                                               const std::vector<double>& x) {
  const std::size_t p = m.n_features();
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phi(p, 0.0);
  double count = 0.0;
  do {
    std::uint64_t known = 0;
    double before = forest_value(m, x, known);
    for (std::size_t f : order) {
      known |= std::uint64_t{1} << f;
      const double after = forest_value(m, x, known);
      phi[f] += after - before;
      before = after;
    }
    count += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  for (auto& v : phi) v /= count;
  return phi;
}

// Random tree over p features in [0, 1): depth <= max_depth, covers
// conserved at every split.
inline void grow_random(kardashev::forest::Tree& t, std::int64_t cover, int depth, int max_depth,
                        std::size_t p, Rng& rng) {
  using kardashev::uniform_index;
  using kardashev::uniform_unit;
  const auto id = t.nodes.size();
  t.nodes.emplace_back();
  t.nodes[id].cover = cover;
  t.nodes[id].value = 10.0 * (uniform_unit(rng) - 0.5);
  const bool split = depth < max_depth && cover >= 2 && uniform_unit(rng) < 0.8;
  if (!split) return;
  const auto feature = static_cast<std::int32_t>(uniform_index(rng, p));
  const double threshold = 0.1 + 0.8 * uniform_unit(rng);
  const auto left_cover =
      1 + static_cast<std::int64_t>(uniform_index(rng, static_cast<std::uint64_t>(cover - 1)));
  const auto l = static_cast<std::int32_t>(t.nodes.size());
  grow_random(t, left_cover, depth + 1, max_depth, p, rng);
  const auto r = static_cast<std::int32_t>(t.nodes.size());
  grow_random(t, cover - left_cover, depth + 1, max_depth, p, rng);
  auto& n = t.nodes[id];
  n.feature = feature;
  n.threshold = threshold;
  n.left = l;
  n.right = r;
}

inline kardashev::forest::ForestModel random_forest(std::size_t p, int n_trees, int max_depth,
                                                    Rng& rng) {
  kardashev::forest::ForestModel m;
  for (std::size_t i = 0; i < p; ++i) m.feature_names.push_back("f" + std::to_string(i));
  for (int i = 0; i < n_trees; ++i) {
    kardashev::forest::Tree t;
    const auto cover = 2 + static_cast<std::int64_t>(kardashev::uniform_index(rng, 200));
    grow_random(t, cover, 0, max_depth, p, rng);
    m.trees.push_back(std::move(t));
  }
  m.hyper.n_trees = n_trees;
  return m;
}

// n rows of ten U(0,1) drivers with y = 3 * gdp_scaled + N(0, 0.1^2).
struct Benchmark {
  kardashev::forest::FeatureMatrix x;
  std::vector<double> y;
  std::vector<std::string> names;
};

inline Benchmark smooth_benchmark(std::size_t n, std::uint64_t seed) {
  Rng rng = kardashev::derive_stream(seed, 99);
  Benchmark b{kardashev::forest::FeatureMatrix(n, 10), std::vector<double>(n), {}};
  for (std::size_t i = 0; i < 10; ++i) b.names.push_back("x" + std::to_string(i));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < 10; ++c) b.x(r, c) = kardashev::uniform_unit(rng);
    b.y[r] = 3.0 * b.x(r, 0) + 0.1 * kardashev::standard_normal(rng);
  }
  return b;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("kardashev_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string sample(const std::string& file) {
  return std::string(KD_SAMPLE_DIR) + "/" + file;
}

}  // namespace kd_test
