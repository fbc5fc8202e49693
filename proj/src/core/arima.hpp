#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "core/nelder_mead.hpp"
#include "core/timeseries.hpp"

namespace kardashev::arima {

struct ArimaOrder {
  int p = 0;
  int d = 0;
  int q = 0;

  // Throws ArgumentError unless p, q in [0, 5], d in [0, 2] and the model has
  // at least one AR/MA term or one difference.
  void validate() const;
  friend bool operator==(const ArimaOrder&, const ArimaOrder&) = default;
};

// Model on the d-times differenced series w:
//   w_t = c + sum_i ar[i] w_{t-1-i} + e_t + sum_j ma[j] e_{t-1-j}
struct ArimaParams {
  double intercept = 0.0;
  std::vector<double> ar;
  std::vector<double> ma;
};

struct ArimaFit {
  ArimaOrder order;
  std::vector<double> ar;
  std::vector<double> ma;
  double intercept = 0.0;
  bool has_intercept = false;
  double sigma2 = 0.0;
  int n_obs = 0;  // observations on the differenced scale
  double css = 0.0;
  double aicc = 0.0;

  ArimaParams params() const { return {intercept, ar, ma}; }
};

struct ForecastPath {
  int start_year = 0;
  int horizon = 0;
  std::vector<double> point;
  std::vector<double> lower95;
  std::vector<double> upper95;
  std::vector<double> psi;  // psi[0..horizon-1] of the integrated model

  int year(int h) const { return start_year + h; }
};

struct FitOptions {
  // Defaults to true for d <= 1 (a mean for d = 0, a drift for d = 1) and
  // false for d = 2.
  std::optional<bool> include_intercept;
  optim::NelderMeadOptions optimizer{};
  int max_restarts = 3;
};

struct SelectOptions {
  // Another difference is taken only while it shrinks the sample variance by
  // more than this fraction.
  double min_variance_reduction = 0.5;
  // Fits with an AR or MA root closer to the unit circle than this are not
  // eligible.
  double min_root_modulus = 1.01;
  // Fits whose AR and MA polynomials share a root to within this relative
  // distance are redundant (the smaller model describes them) and skipped.
  double redundancy_tolerance = 0.1;
  // Candidates within this many AICc units of the minimum count as tied; the
  // tie goes to the smallest p + q, then the smallest p. 0 is plain AICc.
  double aicc_tie_tolerance = 2.0;
  FitOptions fit{};
};

// Conditional sum of squared innovations on the differenced series. Pre-sample
// observations are the differenced-series mean, pre-sample innovations zero.
double css_objective(const ArimaOrder& order, const ArimaParams& params,
                     const ts::AnnualSeries& s);

// Roots of 1 - sum ar_i z^i (sign = -1) or 1 + sum ma_j z^j (sign = +1).
std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coefficients,
                                                   double sign);

// Smallest root modulus of the polynomial above; infinity when it has none.
double min_root_modulus(const std::vector<double>& coefficients, double sign);

// True when some AR root and some MA root lie within tolerance (relative to
// the larger modulus) of each other.
bool near_common_root(const std::vector<double>& ar, const std::vector<double>& ma,
                      double tolerance);

ArimaFit fit(const ts::AnnualSeries& s, const ArimaOrder& order,
             const FitOptions& options = {});

// Differencing order by the variance-reduction rule, capped at d_max.
int select_differencing(const ts::AnnualSeries& s, int d_max,
                        double min_variance_reduction);

ArimaOrder select_order(const ts::AnnualSeries& s, int p_max, int d_max, int q_max,
                        const SelectOptions& options = {});

ForecastPath forecast(const ArimaFit& f, const ts::AnnualSeries& s, int horizon);

}  // namespace kardashev::arima
