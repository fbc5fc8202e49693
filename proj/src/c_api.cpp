#include "kardashev/kardashev.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <new>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "core/arima.hpp"
#include "core/error.hpp"
#include "core/forest.hpp"
#include "core/ingest.hpp"
#include "core/model_io.hpp"
#include "core/pipeline.hpp"
#include "core/shap.hpp"
#include "core/timeseries.hpp"
#include "core/units.hpp"

namespace kd = kardashev;

struct kd_series {
  kd::ts::AnnualSeries s;
};

struct kd_panel {
  std::vector<kd::ingest::PanelRecord> records;
};

struct kd_scenario {
  std::vector<kd::ingest::DriverScenario> rows;
};

struct kd_forest {
  kd::forest::ForestModel model;
};

struct kd_shap_summary {
  kd::shap::SummaryRanking ranking;
};

struct kd_arima {
  kd::arima::ArimaFit fit;
};

struct kd_forecast {
  kd::arima::ForecastPath path;
};

struct kd_global {
  kd::pipeline::GlobalForecast forecast;
};

namespace {

thread_local std::string g_last_error;

kd_status status_of(kd::ErrorKind kind) {
  switch (kind) {
    case kd::ErrorKind::kArgument: return KD_ERR_ARGUMENT;
    case kd::ErrorKind::kDomain: return KD_ERR_DOMAIN;
    case kd::ErrorKind::kSchema: return KD_ERR_SCHEMA;
    case kd::ErrorKind::kValidation: return KD_ERR_VALIDATION;
    case kd::ErrorKind::kIntegrity: return KD_ERR_INTEGRITY;
    case kd::ErrorKind::kCompleteness: return KD_ERR_COMPLETENESS;
    case kd::ErrorKind::kEstimation: return KD_ERR_ESTIMATION;
    case kd::ErrorKind::kCapability: return KD_ERR_CAPABILITY;
    case kd::ErrorKind::kModelIntegrity: return KD_ERR_MODEL_INTEGRITY;
    case kd::ErrorKind::kIo: return KD_ERR_IO;
  }
  return KD_ERR_INTERNAL;
}

kd_status fail(kd_status s, std::string message) {
  g_last_error = std::move(message);
  return s;
}

template <class F>
kd_status guard(F&& f) noexcept {
  try {
    f();
    return KD_OK;
  } catch (const kd::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(KD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(KD_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(KD_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw kd::ArgumentError(std::string(what) + " must not be null");
}

kd::units::YearConvention convention_of(kd_year_convention c) {
  switch (c) {
    case KD_YEAR_CIVIL365: return kd::units::YearConvention::kCivil365;
    case KD_YEAR_JULIAN: return kd::units::YearConvention::kJulian;
  }
  throw kd::ArgumentError("unknown year convention");
}

kd::ingest::Ssp ssp_of(kd_ssp s) {
  switch (s) {
    case KD_SSP126: return kd::ingest::Ssp::k126;
    case KD_SSP245: return kd::ingest::Ssp::k245;
    case KD_SSP370: return kd::ingest::Ssp::k370;
    case KD_SSP585: return kd::ingest::Ssp::k585;
  }
  throw kd::ArgumentError("unknown pathway");
}

kd::forest::Hyperparams hyper_of(const kd_forest_params& p) {
  kd::forest::Hyperparams h;
  h.n_trees = p.n_trees;
  h.mtry = p.mtry;
  h.min_leaf = p.min_leaf;
  h.max_depth = p.max_depth;
  h.seed = p.seed;
  h.n_threads = p.n_threads;
  h.bootstrap = p.bootstrap != 0;
  return h;
}

kd::forest::FeatureMatrix panel_matrix(const kd::forest::ForestModel& model, const kd_panel& panel,
                                       std::vector<double>* y) {
  std::vector<kd::FeatureVector> drivers;
  drivers.reserve(panel.records.size());
  if (y != nullptr) y->clear();
  for (const auto& r : panel.records) {
    drivers.push_back(r.drivers);
    if (y != nullptr) y->push_back(r.energy);
  }
  return kd::ingest::assemble_drivers(drivers, model.feature_names);
}

std::ofstream open_output(const char* path) {
  require(path, "path");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw kd::IoError(std::string("cannot open ") + path + " for writing");
  return out;
}

void finish_output(std::ofstream& out, const char* path) {
  out.flush();
  if (!out) throw kd::IoError(std::string("failed writing ") + path);
}

kd::pipeline::FusionScenario fusion_of(const kd_fusion_params& p) {
  kd::pipeline::FusionScenario s;
  s.pivot_year = p.pivot_year;
  s.k_pivot = p.k_pivot;
  s.growth_with_fusion = p.growth_with_fusion;
  s.growth_baseline = p.growth_baseline;
  s.horizon_year = p.horizon_year;
  return s;
}

}  // namespace

extern "C" {

const char* kd_version(void) { return "1.0.0"; }

const char* kd_status_name(kd_status status) {
  switch (status) {
    case KD_OK: return "ok";
    case KD_ERR_ARGUMENT: return "argument";
    case KD_ERR_DOMAIN: return "domain";
    case KD_ERR_SCHEMA: return "schema";
    case KD_ERR_VALIDATION: return "validation";
    case KD_ERR_INTEGRITY: return "integrity";
    case KD_ERR_COMPLETENESS: return "completeness";
    case KD_ERR_ESTIMATION: return "estimation";
    case KD_ERR_CAPABILITY: return "capability";
    case KD_ERR_MODEL_INTEGRITY: return "model-integrity";
    case KD_ERR_IO: return "io";
    case KD_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* kd_last_error(void) { return g_last_error.c_str(); }

const char* kd_ssp_name(kd_ssp ssp) {
  switch (ssp) {
    case KD_SSP126: return "SSP126";
    case KD_SSP245: return "SSP245";
    case KD_SSP370: return "SSP370";
    case KD_SSP585: return "SSP585";
  }
  return "unknown";
}

// ---- units

double kd_seconds_per_year(kd_year_convention convention) {
  if (convention == KD_YEAR_JULIAN) {
    return kd::units::seconds_per_year(kd::units::YearConvention::kJulian);
  }
  if (convention == KD_YEAR_CIVIL365) {
    return kd::units::seconds_per_year(kd::units::YearConvention::kCivil365);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

kd_status kd_k_from_power(double watts, double* k) {
  return guard([&] {
    require(k, "k");
    *k = kd::units::k_from_power(kd::units::PowerWatts(watts)).value();
  });
}

kd_status kd_power_from_k(double k, double* watts) {
  return guard([&] {
    require(watts, "watts");
    *watts = kd::units::power_from_k(kd::units::KardashevIndex(k)).value();
  });
}

kd_status kd_power_from_annual_energy(double exajoules, kd_year_convention convention,
                                      double* watts) {
  return guard([&] {
    require(watts, "watts");
    *watts = kd::units::power_from_annual_energy(
                 kd::units::AnnualEnergy(exajoules, convention_of(convention)))
                 .value();
  });
}

kd_status kd_annual_energy_from_power(double watts, kd_year_convention convention,
                                      double* exajoules) {
  return guard([&] {
    require(exajoules, "exajoules");
    *exajoules = kd::units::annual_energy_from_power(kd::units::PowerWatts(watts),
                                                     convention_of(convention))
                     .value();
  });
}

kd_status kd_k_from_annual_energy(double exajoules, kd_year_convention convention, double* k) {
  return guard([&] {
    require(k, "k");
    *k = kd::units::k_from_annual_energy(
             kd::units::AnnualEnergy(exajoules, convention_of(convention)))
             .value();
  });
}

// ---- series

kd_status kd_series_create(int start_year, const double* values, size_t n, kd_series** out) {
  return guard([&] {
    require(out, "out");
    *out = nullptr;
    if (n > 0) require(values, "values");
    std::vector<double> v(values, values + n);
    *out = new kd_series{kd::ts::AnnualSeries(start_year, std::move(v))};
  });
}

kd_status kd_series_load_ratio(const char* path, kd_series** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new kd_series{kd::ingest::load_ratio(path).series()};
  });
}

void kd_series_free(kd_series* series) { delete series; }

int kd_series_start_year(const kd_series* series) { return series ? series->s.start_year() : 0; }

size_t kd_series_size(const kd_series* series) { return series ? series->s.size() : 0; }

const double* kd_series_values(const kd_series* series) {
  return series ? series->s.values().data() : nullptr;
}

kd_status kd_series_acf(const kd_series* series, int max_lag, double* out) {
  return guard([&] {
    require(series, "series");
    require(out, "out");
    const auto r = kd::ts::acf(series->s, max_lag);
    std::copy(r.begin(), r.end(), out);
  });
}

kd_status kd_series_pacf(const kd_series* series, int max_lag, double* out) {
  return guard([&] {
    require(series, "series");
    require(out, "out");
    const auto r = kd::ts::pacf(series->s, max_lag);
    std::copy(r.begin(), r.end(), out);
  });
}

kd_status kd_series_difference(const kd_series* series, int d, kd_series** out) {
  return guard([&] {
    require(series, "series");
    require(out, "out");
    *out = nullptr;
    *out = new kd_series{kd::ts::difference(series->s, d)};
  });
}

// ---- panel and scenario

kd_status kd_panel_load(const char* path, kd_panel** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new kd_panel{kd::ingest::load_panel(path)};
  });
}

void kd_panel_free(kd_panel* panel) { delete panel; }

size_t kd_panel_size(const kd_panel* panel) { return panel ? panel->records.size() : 0; }

kd_status kd_panel_write(const kd_panel* panel, const char* path) {
  return guard([&] {
    require(panel, "panel");
    auto out = open_output(path);
    kd::ingest::write_panel(out, panel->records);
    finish_output(out, path);
  });
}

kd_status kd_panel_split(const kd_panel* panel, double holdout_fraction, uint64_t seed,
                         kd_panel** train, kd_panel** test) {
  return guard([&] {
    require(panel, "panel");
    require(train, "train");
    require(test, "test");
    *train = nullptr;
    *test = nullptr;
    const auto [tr, te] =
        kd::forest::split_holdout(panel->records.size(), holdout_fraction, seed);
    auto a = std::make_unique<kd_panel>();
    auto b = std::make_unique<kd_panel>();
    for (auto i : tr) a->records.push_back(panel->records[i]);
    for (auto i : te) b->records.push_back(panel->records[i]);
    *train = a.release();
    *test = b.release();
  });
}

kd_status kd_scenario_load(const char* path, kd_scenario** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new kd_scenario{kd::ingest::load_scenario(path)};
  });
}

void kd_scenario_free(kd_scenario* scenario) { delete scenario; }

size_t kd_scenario_size(const kd_scenario* scenario) {
  return scenario ? scenario->rows.size() : 0;
}

kd_status kd_scenario_year_range(const kd_scenario* scenario, int* first, int* last) {
  return guard([&] {
    require(scenario, "scenario");
    if (scenario->rows.empty()) throw kd::ArgumentError("scenario has no rows");
    const auto [lo, hi] = std::minmax_element(
        scenario->rows.begin(), scenario->rows.end(),
        [](const auto& a, const auto& b) { return a.year < b.year; });
    if (first) *first = lo->year;
    if (last) *last = hi->year;
  });
}

// ---- forest

void kd_forest_params_init(kd_forest_params* params) {
  if (params == nullptr) return;
  const kd::forest::Hyperparams h;
  params->n_trees = h.n_trees;
  params->mtry = h.mtry;
  params->min_leaf = h.min_leaf;
  params->max_depth = h.max_depth;
  params->seed = h.seed;
  params->n_threads = h.n_threads;
  params->bootstrap = h.bootstrap ? 1 : 0;
}

kd_status kd_forest_train(const kd_panel* panel, const kd_forest_params* params,
                          kd_forest** out) {
  return guard([&] {
    require(panel, "panel");
    require(out, "out");
    *out = nullptr;
    kd_forest_params p;
    if (params != nullptr) {
      p = *params;
    } else {
      kd_forest_params_init(&p);
    }
    auto m = kd::ingest::assemble_matrix(panel->records);
    auto model = kd::forest::fit_forest(m.x, m.y, std::move(m.feature_names), hyper_of(p));
    *out = new kd_forest{std::move(model)};
  });
}

void kd_forest_free(kd_forest* forest) { delete forest; }

kd_status kd_forest_evaluate(const kd_forest* forest, const kd_panel* panel, kd_metrics* out) {
  return guard([&] {
    require(forest, "forest");
    require(panel, "panel");
    require(out, "out");
    std::vector<double> y;
    const auto x = panel_matrix(forest->model, *panel, &y);
    const auto m = kd::forest::evaluate(forest->model, x, y);
    out->r2 = m.r2;
    out->rmse = m.rmse;
  });
}

kd_status kd_forest_predict_panel(const kd_forest* forest, const kd_panel* panel, double* out) {
  return guard([&] {
    require(forest, "forest");
    require(panel, "panel");
    if (!panel->records.empty()) require(out, "out");
    const auto x = panel_matrix(forest->model, *panel, nullptr);
    const auto pred = forest->model.predict(x);
    std::copy(pred.begin(), pred.end(), out);
  });
}

double kd_forest_oob_rmse(const kd_forest* forest) {
  return forest ? forest->model.oob_rmse : std::numeric_limits<double>::quiet_NaN();
}

size_t kd_forest_n_trees(const kd_forest* forest) {
  return forest ? forest->model.trees.size() : 0;
}

size_t kd_forest_n_features(const kd_forest* forest) {
  return forest ? forest->model.n_features() : 0;
}

const char* kd_forest_feature_name(const kd_forest* forest, size_t index) {
  if (forest == nullptr || index >= forest->model.feature_names.size()) return nullptr;
  return forest->model.feature_names[index].c_str();
}

kd_status kd_forest_params_of(const kd_forest* forest, kd_forest_params* out) {
  return guard([&] {
    require(forest, "forest");
    require(out, "out");
    const auto& h = forest->model.hyper;
    out->n_trees = h.n_trees;
    out->mtry = h.mtry;
    out->min_leaf = h.min_leaf;
    out->max_depth = h.max_depth;
    out->seed = h.seed;
    out->n_threads = h.n_threads;
    out->bootstrap = h.bootstrap ? 1 : 0;
  });
}

kd_status kd_forest_save(const kd_forest* forest, const char* path, const char* metadata_json) {
  return guard([&] {
    require(forest, "forest");
    require(path, "path");
    kd::model_io::save_forest(path, forest->model, metadata_json ? metadata_json : "{}");
  });
}

kd_status kd_forest_load(const char* path, kd_forest** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new kd_forest{kd::model_io::load_forest(path)};
  });
}

// ---- attribution

kd_status kd_shap_explain(const kd_forest* forest, const double* x, size_t n_features,
                          int exact, double* base_value, double* phi, double* prediction) {
  return guard([&] {
    require(forest, "forest");
    require(x, "x");
    require(phi, "phi");
    if (n_features != forest->model.n_features()) {
      throw kd::ArgumentError("expected " + std::to_string(forest->model.n_features()) +
                              " features, got " + std::to_string(n_features));
    }
    const std::span<const double> row(x, n_features);
    const auto a = exact ? kd::shap::shapley_exact(forest->model, row)
                         : kd::shap::shapley_tree_path(forest->model, row);
    std::copy(a.phi.begin(), a.phi.end(), phi);
    if (base_value) *base_value = a.base_value;
    if (prediction) *prediction = a.prediction;
  });
}

kd_status kd_shap_summarize(const kd_forest* forest, const kd_panel* panel, int32_t n_threads,
                            int exact, kd_shap_summary** out) {
  return guard([&] {
    require(forest, "forest");
    require(panel, "panel");
    require(out, "out");
    *out = nullptr;
    const auto x = panel_matrix(forest->model, *panel, nullptr);
    *out = new kd_shap_summary{kd::shap::summarize(forest->model, x, n_threads, exact != 0)};
  });
}

void kd_shap_summary_free(kd_shap_summary* summary) { delete summary; }

size_t kd_shap_summary_size(const kd_shap_summary* summary) {
  return summary ? summary->ranking.size() : 0;
}

kd_status kd_shap_summary_entry(const kd_shap_summary* summary, size_t index, const char** name,
                                double* mean_abs, int* rank) {
  return guard([&] {
    require(summary, "summary");
    if (index >= summary->ranking.size()) throw kd::ArgumentError("summary index out of range");
    const auto& e = summary->ranking[index];
    if (name) *name = e.name.c_str();
    if (mean_abs) *mean_abs = e.mean_abs;
    if (rank) *rank = e.rank;
  });
}

kd_status kd_shap_summary_write_csv(const kd_shap_summary* summary, const char* path,
                                    const char* comment) {
  return guard([&] {
    require(summary, "summary");
    auto out = open_output(path);
    kd::shap::write_summary_csv(out, summary->ranking, comment ? comment : "");
    finish_output(out, path);
  });
}

// ---- ARIMA

kd_status kd_arima_select(const kd_series* series, int p_max, int d_max, int q_max,
                          kd_arima_order* out) {
  return guard([&] {
    require(series, "series");
    require(out, "out");
    const auto o = kd::arima::select_order(series->s, p_max, d_max, q_max);
    *out = {o.p, o.d, o.q};
  });
}

kd_status kd_arima_fit(const kd_series* series, kd_arima_order order, kd_arima** out) {
  return guard([&] {
    require(series, "series");
    require(out, "out");
    *out = nullptr;
    *out = new kd_arima{kd::arima::fit(series->s, {order.p, order.d, order.q})};
  });
}

void kd_arima_free(kd_arima* fit) { delete fit; }

kd_arima_order kd_arima_get_order(const kd_arima* fit) {
  if (fit == nullptr) return {0, 0, 0};
  return {fit->fit.order.p, fit->fit.order.d, fit->fit.order.q};
}

size_t kd_arima_ar(const kd_arima* fit, const double** out) {
  if (fit == nullptr) return 0;
  if (out) *out = fit->fit.ar.data();
  return fit->fit.ar.size();
}

size_t kd_arima_ma(const kd_arima* fit, const double** out) {
  if (fit == nullptr) return 0;
  if (out) *out = fit->fit.ma.data();
  return fit->fit.ma.size();
}

int kd_arima_has_intercept(const kd_arima* fit) { return fit && fit->fit.has_intercept ? 1 : 0; }

double kd_arima_intercept(const kd_arima* fit) { return fit ? fit->fit.intercept : 0.0; }

double kd_arima_sigma2(const kd_arima* fit) {
  return fit ? fit->fit.sigma2 : std::numeric_limits<double>::quiet_NaN();
}

double kd_arima_css(const kd_arima* fit) {
  return fit ? fit->fit.css : std::numeric_limits<double>::quiet_NaN();
}

double kd_arima_aicc(const kd_arima* fit) {
  return fit ? fit->fit.aicc : std::numeric_limits<double>::quiet_NaN();
}

int kd_arima_n_obs(const kd_arima* fit) { return fit ? fit->fit.n_obs : 0; }

kd_status kd_arima_forecast(const kd_arima* fit, const kd_series* series, int horizon,
                            kd_forecast** out) {
  return guard([&] {
    require(fit, "fit");
    require(series, "series");
    require(out, "out");
    *out = nullptr;
    *out = new kd_forecast{kd::arima::forecast(fit->fit, series->s, horizon)};
  });
}

void kd_forecast_free(kd_forecast* forecast) { delete forecast; }

int kd_forecast_start_year(const kd_forecast* forecast) {
  return forecast ? forecast->path.start_year : 0;
}

int kd_forecast_horizon(const kd_forecast* forecast) {
  return forecast ? forecast->path.horizon : 0;
}

kd_status kd_forecast_get(const kd_forecast* forecast, int step, double* point, double* lower95,
                          double* upper95) {
  return guard([&] {
    require(forecast, "forecast");
    if (step < 0 || step >= forecast->path.horizon) {
      throw kd::ArgumentError("forecast step out of range");
    }
    const auto i = static_cast<std::size_t>(step);
    if (point) *point = forecast->path.point[i];
    if (lower95) *lower95 = forecast->path.lower95[i];
    if (upper95) *upper95 = forecast->path.upper95[i];
  });
}

// ---- global aggregation and scenarios

kd_status kd_global_forecast(const kd_forest* forest, const kd_scenario* scenario,
                             const kd_series* ratio_history, const kd_forecast* ratio_forecast,
                             kd_year_convention convention, kd_global** out) {
  return guard([&] {
    require(forest, "forest");
    require(scenario, "scenario");
    require(ratio_history, "ratio_history");
    require(ratio_forecast, "ratio_forecast");
    require(out, "out");
    *out = nullptr;
    const auto sums = kd::pipeline::predict_countries(forest->model, scenario->rows);
    const auto ratio = kd::pipeline::ratio_by_year(kd::ingest::RatioSeries(ratio_history->s),
                                                   ratio_forecast->path);
    *out = new kd_global{kd::pipeline::aggregate_global(sums, ratio, convention_of(convention))};
  });
}

kd_status kd_global_from_sums(const int* years, const kd_ssp* ssps, const double* sums, size_t n,
                              const int* ratio_years, const double* ratios, size_t n_ratios,
                              kd_year_convention convention, kd_global** out) {
  return guard([&] {
    require(out, "out");
    *out = nullptr;
    if (n > 0) {
      require(years, "years");
      require(ssps, "ssps");
      require(sums, "sums");
    }
    if (n_ratios > 0) {
      require(ratio_years, "ratio_years");
      require(ratios, "ratios");
    }
    kd::pipeline::CountrySums cs;
    for (size_t i = 0; i < n; ++i) cs[{ssp_of(ssps[i]), years[i]}] = sums[i];
    std::map<int, double> r;
    for (size_t i = 0; i < n_ratios; ++i) r[ratio_years[i]] = ratios[i];
    *out = new kd_global{kd::pipeline::aggregate_global(cs, r, convention_of(convention))};
  });
}

void kd_global_free(kd_global* global) { delete global; }

kd_status kd_global_get(const kd_global* global, int year, kd_ssp ssp, double* energy, double* k,
                        double* ratio_used, double* country_sum) {
  return guard([&] {
    require(global, "global");
    const auto& e = global->forecast.at(year, ssp_of(ssp));
    if (energy) *energy = e.energy;
    if (k) *k = e.k;
    if (ratio_used) *ratio_used = e.ratio_used;
    if (country_sum) *country_sum = e.country_sum;
  });
}

kd_status kd_global_table(const kd_global* global, const int* years, size_t n,
                          kd_table_row* out) {
  return guard([&] {
    require(global, "global");
    if (n > 0) {
      require(years, "years");
      require(out, "out");
    }
    const auto rows = kd::pipeline::emit_table(global->forecast, std::span<const int>(years, n));
    for (size_t i = 0; i < rows.size(); ++i) {
      out[i].year = rows[i].year;
      for (size_t j = 0; j < 4; ++j) out[i].energy[j] = rows[i].energy[j];
      out[i].k = rows[i].k;
    }
  });
}

kd_status kd_global_write_table(const kd_global* global, const int* years, size_t n,
                                const char* path, const char* comment) {
  return guard([&] {
    require(global, "global");
    if (n > 0) require(years, "years");
    const auto rows = kd::pipeline::emit_table(global->forecast, std::span<const int>(years, n));
    auto out = open_output(path);
    kd::pipeline::write_table_csv(out, rows, comment ? comment : "");
    finish_output(out, path);
  });
}

kd_status kd_calibrate_growth(double k_start, double k_end, int years, double* growth) {
  return guard([&] {
    require(growth, "growth");
    *growth = kd::pipeline::calibrate_growth(k_start, k_end, years);
  });
}

void kd_fusion_params_init(kd_fusion_params* params) {
  if (params == nullptr) return;
  const auto s = kd::pipeline::default_fusion_scenario();
  params->pivot_year = s.pivot_year;
  params->k_pivot = s.k_pivot;
  params->growth_with_fusion = s.growth_with_fusion;
  params->growth_baseline = s.growth_baseline;
  params->horizon_year = s.horizon_year;
}

kd_status kd_fusion_trajectory(const kd_fusion_params* params, kd_trajectory_point* out,
                               size_t capacity, size_t* count) {
  return guard([&] {
    require(params, "params");
    if (capacity > 0) require(out, "out");
    const auto pts = kd::pipeline::fusion_extrapolate(fusion_of(*params));
    for (size_t i = 0; i < pts.size() && i < capacity; ++i) {
      out[i] = {pts[i].year, pts[i].k_with_fusion, pts[i].k_baseline};
    }
    if (count) *count = pts.size();
  });
}

kd_status kd_fusion_write_csv(const kd_fusion_params* params, const char* path,
                              const char* comment) {
  return guard([&] {
    require(params, "params");
    const auto pts = kd::pipeline::fusion_extrapolate(fusion_of(*params));
    auto out = open_output(path);
    kd::pipeline::write_trajectory_csv(out, pts, comment ? comment : "");
    finish_output(out, path);
  });
}

}  // extern "C"
