#include "core/timeseries.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "core/error.hpp"

namespace kardashev::ts {

namespace {

std::vector<double> first_difference(std::span<const double> v) {
  std::vector<double> out;
  out.reserve(v.size() - 1);
  for (std::size_t i = 1; i < v.size(); ++i) out.push_back(v[i] - v[i - 1]);
  return out;
}

std::vector<double> durbin_levinson(std::span<const double> r, int max_lag,
                                    std::vector<double>* partials) {
  // phi holds the AR(k) coefficients of the current order.
  std::vector<double> phi;
  std::vector<double> prev;
  double v = r[0];
  if (partials) partials->assign(1, 1.0);
  for (int k = 1; k <= max_lag; ++k) {
    double num = r[k];
    for (int j = 1; j < k; ++j) num -= prev[j - 1] * r[k - j];
    const double kappa = v > 0.0 ? num / v : 0.0;
    phi.assign(k, 0.0);
    for (int j = 1; j < k; ++j) phi[j - 1] = prev[j - 1] - kappa * prev[k - j - 1];
    phi[k - 1] = kappa;
    v *= (1.0 - kappa * kappa);
    if (partials) partials->push_back(kappa);
    prev = phi;
  }
  return phi;
}

}  // namespace

AnnualSeries::AnnualSeries(int start_year, std::vector<double> values)
    : start_year_(start_year), values_(std::move(values)) {
  if (values_.empty()) throw ArgumentError("series must have at least one value");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw ArgumentError("series value for year " + std::to_string(start_year_ + i) +
                          " is not finite");
    }
  }
}

double AnnualSeries::at_year(int year) const {
  if (year < start_year_ || year > end_year()) {
    throw ArgumentError("year " + std::to_string(year) + " outside series range " +
                        std::to_string(start_year_) + ".." + std::to_string(end_year()));
  }
  return values_[static_cast<std::size_t>(year - start_year_)];
}

AnnualSeries difference(const AnnualSeries& s, int d) {
  if (d < 0 || static_cast<std::size_t>(d) >= s.size()) {
    throw ArgumentError("differencing order " + std::to_string(d) +
                        " requires more than " + std::to_string(d) + " values");
  }
  std::vector<double> v(s.values().begin(), s.values().end());
  for (int k = 0; k < d; ++k) v = first_difference(v);
  return AnnualSeries(s.start_year() + d, std::move(v));
}

std::vector<double> difference_heads(const AnnualSeries& s, int d) {
  if (d < 0 || static_cast<std::size_t>(d) >= s.size()) {
    throw ArgumentError("differencing order out of range");
  }
  std::vector<double> heads;
  std::vector<double> v(s.values().begin(), s.values().end());
  for (int k = 0; k < d; ++k) {
    heads.push_back(v.front());
    v = first_difference(v);
  }
  return heads;
}

AnnualSeries integrate(const AnnualSeries& diff, std::span<const double> heads) {
  std::vector<double> v(diff.values().begin(), diff.values().end());
  for (std::size_t k = heads.size(); k-- > 0;) {
    std::vector<double> up;
    up.reserve(v.size() + 1);
    up.push_back(heads[k]);
    for (double x : v) up.push_back(up.back() + x);
    v = std::move(up);
  }
  return AnnualSeries(diff.start_year() - static_cast<int>(heads.size()), std::move(v));
}

double sample_variance(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : values) ss += (x - mean) * (x - mean);
  return ss / n;
}

std::vector<double> acf(const AnnualSeries& s, int max_lag) {
  if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= s.size()) {
    throw ArgumentError("max_lag must be in [0, length)");
  }
  const auto v = s.values();
  const std::size_t n = v.size();
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);
  double c0 = 0.0;
  for (double x : v) c0 += (x - mean) * (x - mean);
  if (!(c0 > 0.0)) throw DomainError("autocorrelation of a zero-variance series");

  std::vector<double> r(static_cast<std::size_t>(max_lag) + 1);
  r[0] = 1.0;
  for (int k = 1; k <= max_lag; ++k) {
    double ck = 0.0;
    for (std::size_t t = static_cast<std::size_t>(k); t < n; ++t) {
      ck += (v[t] - mean) * (v[t - k] - mean);
    }
    r[k] = ck / c0;
  }
  return r;
}

std::vector<double> pacf(const AnnualSeries& s, int max_lag) {
  const auto r = acf(s, max_lag);
  std::vector<double> partials;
  durbin_levinson(r, max_lag, &partials);
  return partials;
}

std::vector<double> yule_walker(std::span<const double> autocorr, int p) {
  if (p < 0 || static_cast<std::size_t>(p) >= autocorr.size()) {
    throw ArgumentError("yule_walker needs autocorrelations up to lag p");
  }
  return durbin_levinson(autocorr, p, nullptr);
}

std::pair<AnnualSeries, AnnualSeries> split_chronological(const AnnualSeries& s,
                                                          double holdout_fraction) {
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    throw ArgumentError("holdout fraction must lie in (0, 1)");
  }
  const auto n = s.size();
  const auto n_test = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * holdout_fraction));
  if (n_test == 0 || n_test >= n) {
    throw ArgumentError("holdout fraction leaves an empty training or test part");
  }
  const auto v = s.values();
  const std::size_t n_train = n - n_test;
  return {AnnualSeries(s.start_year(), {v.begin(), v.begin() + n_train}),
          AnnualSeries(s.start_year() + static_cast<int>(n_train),
                       {v.begin() + n_train, v.end()})};
}

}  // namespace kardashev::ts
