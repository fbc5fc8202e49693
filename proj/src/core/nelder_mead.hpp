#pragma once

#include <functional>
#include <span>
#include <vector>

namespace kardashev::optim {

struct NelderMeadOptions {
  int max_iterations = 20000;
  // Converged when the spread of objective values across the simplex is below
  // f_tolerance * (|f_best| + f_tolerance) and every vertex lies within
  // x_tolerance of the best one.
  double f_tolerance = 1e-12;
  double x_tolerance = 1e-9;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

// Derivative-free minimisation with the standard reflection / expansion /
// contraction / shrink moves (coefficients 1, 2, 0.5, 0.5). step[i] is the
// initial edge length of the simplex along coordinate i.
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> start,
                             std::span<const double> step,
                             const NelderMeadOptions& options = {});

}  // namespace kardashev::optim
