#include "core/arima.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "core/error.hpp"

namespace kardashev::arima {

namespace {

constexpr int kMaxArmaOrder = 5;
constexpr int kMaxDifferencing = 2;
constexpr double kUnitCircleGuard = 1.001;
constexpr double kInterval95 = 1.96;

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Innovations of the conditional recursion; see css_objective.
std::vector<double> innovations(std::span<const double> w, const ArimaParams& params) {
  const double mu = mean_of(w);
  const std::size_t p = params.ar.size();
  const std::size_t q = params.ma.size();
  std::vector<double> e(w.size());
  for (std::size_t t = 0; t < w.size(); ++t) {
    double pred = params.intercept;
    for (std::size_t i = 1; i <= p; ++i) pred += params.ar[i - 1] * (t >= i ? w[t - i] : mu);
    for (std::size_t j = 1; j <= q; ++j) {
      if (t >= j) pred += params.ma[j - 1] * e[t - j];
    }
    e[t] = w[t] - pred;
  }
  return e;
}

double sum_squares(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

ArimaParams unpack(std::span<const double> x, const ArimaOrder& order, bool with_intercept) {
  ArimaParams params;
  std::size_t k = 0;
  if (with_intercept) params.intercept = x[k++];
  params.ar.assign(x.begin() + static_cast<long>(k), x.begin() + static_cast<long>(k + order.p));
  k += static_cast<std::size_t>(order.p);
  params.ma.assign(x.begin() + static_cast<long>(k), x.begin() + static_cast<long>(k + order.q));
  return params;
}

std::vector<double> pack(const ArimaParams& params, bool with_intercept) {
  std::vector<double> x;
  if (with_intercept) x.push_back(params.intercept);
  x.insert(x.end(), params.ar.begin(), params.ar.end());
  x.insert(x.end(), params.ma.begin(), params.ma.end());
  return x;
}

bool admissible(const ArimaParams& params) {
  return min_root_modulus(params.ar, -1.0) >= kUnitCircleGuard &&
         min_root_modulus(params.ma, +1.0) >= kUnitCircleGuard;
}

double gaussian_aicc(double css, int n, int n_params) {
  const double sigma2 = css / n;
  const double loglik = -0.5 * n * (std::log(2.0 * std::numbers::pi * sigma2) + 1.0);
  const int k = n_params + 1;  // + innovation variance
  const double aic = -2.0 * loglik + 2.0 * k;
  const double denom = n - k - 1;
  if (denom <= 0) return std::numeric_limits<double>::infinity();
  return aic + 2.0 * k * (k + 1) / denom;
}

}  // namespace

void ArimaOrder::validate() const {
  if (p < 0 || p > kMaxArmaOrder || q < 0 || q > kMaxArmaOrder) {
    throw ArgumentError("AR and MA orders must lie in [0, 5]");
  }
  if (d < 0 || d > kMaxDifferencing) throw ArgumentError("differencing order must lie in [0, 2]");
  if (p + q == 0 && d == 0) throw ArgumentError("ARIMA(0,0,0) has no dynamics");
}

std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coefficients,
                                                   double sign) {
  std::size_t n = coefficients.size();
  while (n > 0 && coefficients[n - 1] == 0.0) --n;
  std::vector<std::complex<double>> roots;
  if (n == 0) return roots;
  // Roots of 1 + sign*sum c_i z^i are reciprocals of the eigenvalues of the
  // companion matrix with first row -sign*c.
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                    static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    companion(0, static_cast<Eigen::Index>(i)) = -sign * coefficients[i];
  }
  for (std::size_t i = 1; i < n; ++i) {
    companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const auto ev = solver.eigenvalues()[i];
    // A zero eigenvalue is a root at infinity.
    if (ev != 0.0) roots.push_back(1.0 / ev);
  }
  return roots;
}

double min_root_modulus(const std::vector<double>& coefficients, double sign) {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& z : polynomial_roots(coefficients, sign)) r = std::min(r, std::abs(z));
  return r;
}

bool near_common_root(const std::vector<double>& ar, const std::vector<double>& ma,
                      double tolerance) {
  const auto a = polynomial_roots(ar, -1.0);
  const auto b = polynomial_roots(ma, +1.0);
  for (const auto& x : a) {
    for (const auto& y : b) {
      if (std::abs(x - y) < tolerance * std::max(std::abs(x), std::abs(y))) return true;
    }
  }
  return false;
}

double css_objective(const ArimaOrder& order, const ArimaParams& params,
                     const ts::AnnualSeries& s) {
  if (params.ar.size() != static_cast<std::size_t>(order.p) ||
      params.ma.size() != static_cast<std::size_t>(order.q)) {
    throw ArgumentError("parameter vector does not match the ARIMA order");
  }
  const auto w = ts::difference(s, order.d);
  if (w.size() <= static_cast<std::size_t>(order.p + order.q + 1)) {
    throw ArgumentError("series too short for the requested order");
  }
  return sum_squares(innovations(w.values(), params));
}

ArimaFit fit(const ts::AnnualSeries& s, const ArimaOrder& order, const FitOptions& options) {
  order.validate();
  if (static_cast<std::size_t>(order.d) >= s.size()) {
    throw ArgumentError("series too short to difference");
  }
  const auto w_series = ts::difference(s, order.d);
  const auto w = w_series.values();
  const int m = static_cast<int>(w.size());
  if (m < 10 + order.p + order.q) {
    throw ArgumentError("ARIMA(" + std::to_string(order.p) + "," + std::to_string(order.d) +
                        "," + std::to_string(order.q) + ") needs at least " +
                        std::to_string(10 + order.p + order.q) +
                        " observations after differencing, got " + std::to_string(m));
  }
  const bool with_intercept = options.include_intercept.value_or(order.d <= 1);
  const double mu = mean_of(w);
  const double scale = std::sqrt(ts::sample_variance(w));
  const double penalty_base = 10.0 * (sum_squares(w) + 1.0);

  auto objective = [&](std::span<const double> x) {
    const ArimaParams params = unpack(x, order, with_intercept);
    const double r = std::min(min_root_modulus(params.ar, -1.0),
                              min_root_modulus(params.ma, +1.0));
    if (r < kUnitCircleGuard) return penalty_base * (1.0 + 1e4 * (kUnitCircleGuard - r));
    return sum_squares(innovations(w, params));
  };

  ArimaFit result;
  result.order = order;
  result.has_intercept = with_intercept;
  result.n_obs = m;

  const int n_free = order.p + order.q + (with_intercept ? 1 : 0);
  ArimaParams best;
  double best_value = std::numeric_limits<double>::infinity();

  if (n_free == 0) {
    best.ar.assign(static_cast<std::size_t>(order.p), 0.0);
    best.ma.assign(static_cast<std::size_t>(order.q), 0.0);
    best_value = sum_squares(innovations(w, best));
  } else {
    std::vector<ArimaParams> starts;
    ArimaParams zero;
    zero.ar.assign(static_cast<std::size_t>(order.p), 0.0);
    zero.ma.assign(static_cast<std::size_t>(order.q), 0.0);
    zero.intercept = with_intercept ? mu : 0.0;
    starts.push_back(zero);
    if (order.p > 0 && scale > 0.0) {
      ArimaParams yw = zero;
      yw.ar = ts::yule_walker(ts::acf(w_series, order.p), order.p);
      if (with_intercept) {
        yw.intercept = mu * (1.0 - std::accumulate(yw.ar.begin(), yw.ar.end(), 0.0));
      }
      if (admissible(yw)) starts.push_back(yw);
    }

    std::vector<double> step;
    if (with_intercept) step.push_back(scale > 0.0 ? 0.1 * scale : 0.1);
    step.insert(step.end(), static_cast<std::size_t>(order.p + order.q), 0.1);

    std::vector<double> best_x;
    bool converged = false;
    for (const auto& start : starts) {
      auto res = optim::nelder_mead(objective, pack(start, with_intercept), step, options.optimizer);
      // Restart from the optimum with a fresh simplex; a single run can stall
      // on a collapsed simplex.
      for (int r = 0; r < options.max_restarts; ++r) {
        auto again = optim::nelder_mead(objective, res.x, step, options.optimizer);
        const bool stable = again.converged && res.converged &&
                            again.value >= res.value - 1e-12 * (std::abs(res.value) + 1e-300);
        res = again.value <= res.value ? again : res;
        if (stable) break;
      }
      if (res.value < best_value) {
        best_value = res.value;
        best_x = res.x;
        converged = res.converged;
      }
    }
    if (!converged) {
      throw EstimationError("ARIMA optimizer did not converge", best_x, best_value);
    }
    best = unpack(best_x, order, with_intercept);
    if (!admissible(best)) {
      throw EstimationError("ARIMA estimate lies on the non-stationary boundary", best_x,
                            best_value);
    }
  }

  result.ar = best.ar;
  result.ma = best.ma;
  result.intercept = best.intercept;
  result.css = best_value;
  result.sigma2 = best_value / m;
  if (!(result.sigma2 > 0.0) || !std::isfinite(result.sigma2)) {
    throw DomainError("fitted innovation variance is zero; the series is deterministic");
  }
  result.aicc = gaussian_aicc(best_value, m, n_free);
  return result;
}

int select_differencing(const ts::AnnualSeries& s, int d_max, double min_variance_reduction) {
  int d = 0;
  double v = ts::sample_variance(s.values());
  while (d < d_max && static_cast<std::size_t>(d + 2) < s.size()) {
    const double v_next = ts::sample_variance(ts::difference(s, d + 1).values());
    if (!(v_next < (1.0 - min_variance_reduction) * v)) break;
    ++d;
    v = v_next;
  }
  return d;
}

ArimaOrder select_order(const ts::AnnualSeries& s, int p_max, int d_max, int q_max,
                        const SelectOptions& options) {
  if (p_max < 0 || p_max > kMaxArmaOrder || q_max < 0 || q_max > kMaxArmaOrder ||
      d_max < 0 || d_max > kMaxDifferencing) {
    throw ArgumentError("order bounds must satisfy p,q in [0,5] and d in [0,2]");
  }
  if (!(ts::sample_variance(s.values()) > 0.0)) {
    throw DomainError("cannot select an ARIMA order for a zero-variance series");
  }
  const int d = select_differencing(s, d_max, options.min_variance_reduction);

  struct Candidate {
    ArimaOrder order;
    double aicc;
  };
  // Visited by (p + q, p), simplest first.
  std::vector<Candidate> eligible;
  for (int total = 0; total <= p_max + q_max; ++total) {
    for (int p = 0; p <= std::min(total, p_max); ++p) {
      const int q = total - p;
      if (q > q_max) continue;
      const ArimaOrder order{p, d, q};
      if (p + q == 0 && d == 0) continue;
      const auto m = static_cast<long>(s.size()) - d;
      if (m < 10 + p + q) continue;
      try {
        const auto f = fit(s, order, options.fit);
        if (std::min(min_root_modulus(f.ar, -1.0), min_root_modulus(f.ma, +1.0)) <
            options.min_root_modulus) {
          continue;
        }
        if (near_common_root(f.ar, f.ma, options.redundancy_tolerance)) continue;
        if (std::isfinite(f.aicc)) eligible.push_back({order, f.aicc});
      } catch (const EstimationError&) {
      } catch (const DomainError&) {
      }
    }
  }
  std::optional<ArimaOrder> best;
  if (!eligible.empty()) {
    double min_aicc = std::numeric_limits<double>::infinity();
    for (const auto& c : eligible) min_aicc = std::min(min_aicc, c.aicc);
    for (const auto& c : eligible) {
      if (c.aicc <= min_aicc + options.aicc_tie_tolerance) {
        best = c.order;
        break;
      }
    }
  }
  if (!best) throw ArgumentError("series too short for any ARIMA candidate");
  return *best;
}

ForecastPath forecast(const ArimaFit& f, const ts::AnnualSeries& s, int horizon) {
  if (horizon < 1) throw ArgumentError("forecast horizon must be at least 1");
  const int d = f.order.d;
  const auto w_series = ts::difference(s, d);
  const auto w = w_series.values();
  const ArimaParams params = f.params();
  const auto e = innovations(w, params);
  const double mu = mean_of(w);
  const std::size_t p = params.ar.size();
  const std::size_t q = params.ma.size();
  const std::size_t n = w.size();
  const auto h_count = static_cast<std::size_t>(horizon);

  // Recursive conditional expectation on the differenced scale.
  std::vector<double> ext(w.begin(), w.end());
  for (std::size_t h = 0; h < h_count; ++h) {
    const std::size_t t = n + h;
    double pred = params.intercept;
    for (std::size_t i = 1; i <= p; ++i) pred += params.ar[i - 1] * (t >= i ? ext[t - i] : mu);
    for (std::size_t j = 1; j <= q; ++j) {
      if (t >= j && t - j < n) pred += params.ma[j - 1] * e[t - j];
    }
    ext.push_back(pred);
  }
  std::vector<double> point(ext.begin() + static_cast<long>(n), ext.end());

  // Undo the differencing, innermost stage first.
  for (int k = d - 1; k >= 0; --k) {
    double level = ts::difference(s, k).values().back();
    for (double& x : point) {
      level += x;
      x = level;
    }
  }

  // psi-weights of theta(B) / (phi(B) (1 - B)^d).
  std::vector<double> phi_star(params.ar.begin(), params.ar.end());
  for (int k = 0; k < d; ++k) {
    // Multiply 1 - sum phi_i B^i by (1 - B).
    std::vector<double> next(phi_star.size() + 1, 0.0);
    for (std::size_t i = 0; i < phi_star.size(); ++i) next[i] += phi_star[i];
    next[0] += 1.0;
    for (std::size_t i = 0; i < phi_star.size(); ++i) next[i + 1] -= phi_star[i];
    phi_star = std::move(next);
  }
  std::vector<double> psi(h_count, 0.0);
  psi[0] = 1.0;
  for (std::size_t j = 1; j < h_count; ++j) {
    double v = j <= q ? params.ma[j - 1] : 0.0;
    for (std::size_t i = 1; i <= std::min(j, phi_star.size()); ++i) v += phi_star[i - 1] * psi[j - i];
    psi[j] = v;
  }

  ForecastPath path;
  path.start_year = s.end_year() + 1;
  path.horizon = horizon;
  path.point = point;
  path.psi = psi;
  path.lower95.resize(h_count);
  path.upper95.resize(h_count);
  double cumulative = 0.0;
  for (std::size_t h = 0; h < h_count; ++h) {
    cumulative += psi[h] * psi[h];
    const double half = kInterval95 * std::sqrt(f.sigma2 * cumulative);
    path.lower95[h] = point[h] - half;
    path.upper95[h] = point[h] + half;
  }
  return path;
}

}  // namespace kardashev::arima
