#include "core/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace kardashev::optim {

namespace {

double safe_eval(const Objective& f, std::span<const double> x) {
  const double v = f(x);
  return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> start,
                             std::span<const double> step,
                             const NelderMeadOptions& options) {
  const std::size_t n = start.size();
  NelderMeadResult result;
  if (n == 0) {
    result.value = safe_eval(f, start);
    result.x = std::move(start);
    result.converged = true;
    return result;
  }

  std::vector<std::vector<double>> simplex(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step[i];
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i <= n; ++i) values[i] = safe_eval(f, simplex[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);

  auto point_along = [&](double t, std::vector<double>& out) {
    // centroid + t * (centroid - worst)
    const auto& worst = simplex[order[n]];
    for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + t * (centroid[j] - worst[j]);
  };

  int it = 0;
  for (; it < options.max_iterations; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    const double best = values[order[0]];
    const double worst_value = values[order[n]];
    double max_dx = 0.0;
    double scale = 1.0;
    for (double x : simplex[order[0]]) scale = std::max(scale, 1.0 + std::abs(x));
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        max_dx = std::max(max_dx, std::abs(simplex[order[i]][j] - simplex[order[0]][j]));
      }
    }
    if (std::isfinite(worst_value) &&
        worst_value - best <= options.f_tolerance * (std::abs(best) + options.f_tolerance) &&
        max_dx <= options.x_tolerance * scale) {
      result.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[order[i]][j];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    point_along(1.0, trial);
    const double f_reflect = safe_eval(f, trial);
    const double second_worst = values[order[n - 1]];

    if (f_reflect < best) {
      point_along(2.0, trial2);
      const double f_expand = safe_eval(f, trial2);
      if (f_expand < f_reflect) {
        simplex[order[n]] = trial2;
        values[order[n]] = f_expand;
      } else {
        simplex[order[n]] = trial;
        values[order[n]] = f_reflect;
      }
      continue;
    }
    if (f_reflect < second_worst) {
      simplex[order[n]] = trial;
      values[order[n]] = f_reflect;
      continue;
    }

    const bool outside = f_reflect < worst_value;
    point_along(outside ? 0.5 : -0.5, trial2);
    const double f_contract = safe_eval(f, trial2);
    if (f_contract < (outside ? f_reflect : worst_value)) {
      simplex[order[n]] = trial2;
      values[order[n]] = f_contract;
      continue;
    }

    const auto& best_point = simplex[order[0]];
    for (std::size_t i = 1; i <= n; ++i) {
      auto& v = simplex[order[i]];
      for (std::size_t j = 0; j < n; ++j) v[j] = best_point[j] + 0.5 * (v[j] - best_point[j]);
      values[order[i]] = safe_eval(f, v);
    }
  }

  const auto best_it = std::min_element(values.begin(), values.end());
  result.x = simplex[static_cast<std::size_t>(best_it - values.begin())];
  result.value = *best_it;
  result.iterations = it;
  return result;
}

}  // namespace kardashev::optim
