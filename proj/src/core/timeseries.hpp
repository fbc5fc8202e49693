#pragma once

#include <span>
#include <utility>
#include <vector>

namespace kardashev::ts {

// Values for consecutive calendar years starting at start_year. Construction
// rejects empty or non-finite input; there is no notion of a missing year.
class AnnualSeries {
 public:
  AnnualSeries(int start_year, std::vector<double> values);

  int start_year() const noexcept { return start_year_; }
  int end_year() const noexcept { return start_year_ + static_cast<int>(values_.size()) - 1; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double at_year(int year) const;

  friend bool operator==(const AnnualSeries&, const AnnualSeries&) = default;

 private:
  int start_year_;
  std::vector<double> values_;
};

// Applies the first-difference operator d times. Requires d < size().
AnnualSeries difference(const AnnualSeries& s, int d);

// First value of each of the stages s, diff(s), ..., diff^{d-1}(s). These are
// exactly the values integrate() needs to undo difference(s, d).
std::vector<double> difference_heads(const AnnualSeries& s, int d);

// Inverse of difference(): heads[k] is the first value of the k-times
// differenced series. The result starts heads.size() years earlier.
AnnualSeries integrate(const AnnualSeries& diff, std::span<const double> heads);

// Sample autocorrelations r_0..r_max_lag with the biased (1/n) autocovariance.
std::vector<double> acf(const AnnualSeries& s, int max_lag);

// Partial autocorrelations for lags 0..max_lag (index 0 holds 1.0) by the
// Durbin-Levinson recursion on acf().
std::vector<double> pacf(const AnnualSeries& s, int max_lag);

// Yule-Walker AR(p) coefficients from autocorrelations r_0..r_p, solved by
// Durbin-Levinson.
std::vector<double> yule_walker(std::span<const double> autocorr, int p);

// Leading (1 - holdout_fraction) share and trailing share, in order.
std::pair<AnnualSeries, AnnualSeries> split_chronological(const AnnualSeries& s,
                                                          double holdout_fraction);

double sample_variance(std::span<const double> values);

}  // namespace kardashev::ts
