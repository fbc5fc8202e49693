/*
 * kardashev: energy-consumption forecasting and Kardashev-index projection.
 *
 * C interface over the forecasting library. Objects are opaque handles
 * created by *_load / *_create / *_train functions and released with the
 * matching *_free. Every fallible call returns a kd_status; on failure the
 * message is available from kd_last_error() on the same thread until the
 * next failing call.
 *
 * Handles are immutable once created and may be shared between threads.
 */
#ifndef KARDASHEV_KARDASHEV_H
#define KARDASHEV_KARDASHEV_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(KARDASHEV_BUILDING_LIBRARY)
#    define KD_API __declspec(dllexport)
#  else
#    define KD_API __declspec(dllimport)
#  endif
#else
#  define KD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kd_status {
  KD_OK = 0,
  KD_ERR_ARGUMENT = 1,
  KD_ERR_DOMAIN = 2,
  KD_ERR_SCHEMA = 3,
  KD_ERR_VALIDATION = 4,
  KD_ERR_INTEGRITY = 5,
  KD_ERR_COMPLETENESS = 6,
  KD_ERR_ESTIMATION = 7,
  KD_ERR_CAPABILITY = 8,
  KD_ERR_MODEL_INTEGRITY = 9,
  KD_ERR_IO = 10,
  KD_ERR_INTERNAL = 11
} kd_status;

typedef enum kd_year_convention {
  KD_YEAR_CIVIL365 = 0, /* 31,536,000 s */
  KD_YEAR_JULIAN = 1    /* 31,557,600 s */
} kd_year_convention;

typedef enum kd_ssp { KD_SSP126 = 0, KD_SSP245 = 1, KD_SSP370 = 2, KD_SSP585 = 3 } kd_ssp;

KD_API const char* kd_version(void);
KD_API const char* kd_status_name(kd_status status);
KD_API const char* kd_last_error(void);
KD_API const char* kd_ssp_name(kd_ssp ssp);

/* ---- Kardashev index, power and annual energy ------------------------- */

KD_API double kd_seconds_per_year(kd_year_convention convention);
KD_API kd_status kd_k_from_power(double watts, double* k);
KD_API kd_status kd_power_from_k(double k, double* watts);
KD_API kd_status kd_power_from_annual_energy(double exajoules, kd_year_convention convention,
                                             double* watts);
KD_API kd_status kd_annual_energy_from_power(double watts, kd_year_convention convention,
                                             double* exajoules);
KD_API kd_status kd_k_from_annual_energy(double exajoules, kd_year_convention convention,
                                         double* k);

/* ---- Annual series ------------------------------------------------------ */

typedef struct kd_series kd_series;

KD_API kd_status kd_series_create(int start_year, const double* values, size_t n,
                                  kd_series** out);
/* Loads a `year,ratio` file; every value must lie in (0, 1]. */
KD_API kd_status kd_series_load_ratio(const char* path, kd_series** out);
KD_API void kd_series_free(kd_series* series);
KD_API int kd_series_start_year(const kd_series* series);
KD_API size_t kd_series_size(const kd_series* series);
KD_API const double* kd_series_values(const kd_series* series);

/* out receives max_lag + 1 values. */
KD_API kd_status kd_series_acf(const kd_series* series, int max_lag, double* out);
KD_API kd_status kd_series_pacf(const kd_series* series, int max_lag, double* out);
KD_API kd_status kd_series_difference(const kd_series* series, int d, kd_series** out);

/* ---- Input data --------------------------------------------------------- */

typedef struct kd_panel kd_panel;
typedef struct kd_scenario kd_scenario;

KD_API kd_status kd_panel_load(const char* path, kd_panel** out);
KD_API void kd_panel_free(kd_panel* panel);
KD_API size_t kd_panel_size(const kd_panel* panel);
KD_API kd_status kd_panel_write(const kd_panel* panel, const char* path);
/* Seeded random row holdout. */
KD_API kd_status kd_panel_split(const kd_panel* panel, double holdout_fraction, uint64_t seed,
                                kd_panel** train, kd_panel** test);

KD_API kd_status kd_scenario_load(const char* path, kd_scenario** out);
KD_API void kd_scenario_free(kd_scenario* scenario);
KD_API size_t kd_scenario_size(const kd_scenario* scenario);
KD_API kd_status kd_scenario_year_range(const kd_scenario* scenario, int* first, int* last);

/* ---- Random forest ------------------------------------------------------ */

typedef struct kd_forest_params {
  int32_t n_trees;   /* default 500 */
  int32_t mtry;      /* 0: ceil(p / 3) */
  int32_t min_leaf;  /* default 2 */
  int32_t max_depth; /* 0: unlimited */
  uint64_t seed;     /* default 42 */
  int32_t n_threads; /* 0: hardware concurrency; never changes the model */
  int32_t bootstrap; /* default 1 */
} kd_forest_params;

typedef struct kd_metrics {
  double r2;
  double rmse;
} kd_metrics;

typedef struct kd_forest kd_forest;

KD_API void kd_forest_params_init(kd_forest_params* params);
KD_API kd_status kd_forest_train(const kd_panel* panel, const kd_forest_params* params,
                                 kd_forest** out);
KD_API void kd_forest_free(kd_forest* forest);
KD_API kd_status kd_forest_evaluate(const kd_forest* forest, const kd_panel* panel,
                                    kd_metrics* out);
/* out must hold kd_panel_size(panel) values. */
KD_API kd_status kd_forest_predict_panel(const kd_forest* forest, const kd_panel* panel,
                                         double* out);
KD_API double kd_forest_oob_rmse(const kd_forest* forest);
KD_API size_t kd_forest_n_trees(const kd_forest* forest);
KD_API size_t kd_forest_n_features(const kd_forest* forest);
KD_API const char* kd_forest_feature_name(const kd_forest* forest, size_t index);
KD_API kd_status kd_forest_params_of(const kd_forest* forest, kd_forest_params* out);
/* metadata_json: a JSON object stored with the model, or NULL. */
KD_API kd_status kd_forest_save(const kd_forest* forest, const char* path,
                                const char* metadata_json);
KD_API kd_status kd_forest_load(const char* path, kd_forest** out);

/* ---- Shapley attribution ------------------------------------------------ */

typedef struct kd_shap_summary kd_shap_summary;

/* phi must hold kd_forest_n_features(forest) values. exact != 0 selects
 * subset enumeration (at most 20 features), otherwise the path algorithm. */
KD_API kd_status kd_shap_explain(const kd_forest* forest, const double* x, size_t n_features,
                                 int exact, double* base_value, double* phi,
                                 double* prediction);
/* Mean |phi| per feature over the panel rows, ranked. */
KD_API kd_status kd_shap_summarize(const kd_forest* forest, const kd_panel* panel,
                                   int32_t n_threads, int exact, kd_shap_summary** out);
KD_API void kd_shap_summary_free(kd_shap_summary* summary);
KD_API size_t kd_shap_summary_size(const kd_shap_summary* summary);
KD_API kd_status kd_shap_summary_entry(const kd_shap_summary* summary, size_t index,
                                       const char** name, double* mean_abs, int* rank);
/* comment (may be NULL) becomes a leading "# ..." line. */
KD_API kd_status kd_shap_summary_write_csv(const kd_shap_summary* summary, const char* path,
                                           const char* comment);

/* ---- ARIMA -------------------------------------------------------------- */

typedef struct kd_arima_order {
  int p;
  int d;
  int q;
} kd_arima_order;

typedef struct kd_arima kd_arima;
typedef struct kd_forecast kd_forecast;

KD_API kd_status kd_arima_select(const kd_series* series, int p_max, int d_max, int q_max,
                                 kd_arima_order* out);
KD_API kd_status kd_arima_fit(const kd_series* series, kd_arima_order order, kd_arima** out);
KD_API void kd_arima_free(kd_arima* fit);
KD_API kd_arima_order kd_arima_get_order(const kd_arima* fit);
/* Return the coefficient count and point *out at internal storage. */
KD_API size_t kd_arima_ar(const kd_arima* fit, const double** out);
KD_API size_t kd_arima_ma(const kd_arima* fit, const double** out);
KD_API int kd_arima_has_intercept(const kd_arima* fit);
KD_API double kd_arima_intercept(const kd_arima* fit);
KD_API double kd_arima_sigma2(const kd_arima* fit);
KD_API double kd_arima_css(const kd_arima* fit);
KD_API double kd_arima_aicc(const kd_arima* fit);
KD_API int kd_arima_n_obs(const kd_arima* fit);

KD_API kd_status kd_arima_forecast(const kd_arima* fit, const kd_series* series, int horizon,
                                   kd_forecast** out);
KD_API void kd_forecast_free(kd_forecast* forecast);
KD_API int kd_forecast_start_year(const kd_forecast* forecast);
KD_API int kd_forecast_horizon(const kd_forecast* forecast);
KD_API kd_status kd_forecast_get(const kd_forecast* forecast, int step, double* point,
                                 double* lower95, double* upper95);

/* ---- Global aggregation and scenarios ----------------------------------- */

typedef struct kd_global kd_global;

typedef struct kd_table_row {
  int year;
  double energy[4]; /* EJ: SSP126, SSP245, SSP370, SSP585 */
  double k;         /* from the SSP126 energy */
} kd_table_row;

typedef struct kd_fusion_params {
  int pivot_year;
  double k_pivot;
  double growth_with_fusion;
  double growth_baseline;
  int horizon_year;
} kd_fusion_params;

typedef struct kd_trajectory_point {
  int year;
  double k_with_fusion;
  double k_baseline;
} kd_trajectory_point;

/* Predicts every scenario row, sums per (pathway, year) and divides by the
 * forecast-country share: observed ratios from `ratio_history` where
 * available, `ratio_forecast` point forecasts after. */
KD_API kd_status kd_global_forecast(const kd_forest* forest, const kd_scenario* scenario,
                                    const kd_series* ratio_history,
                                    const kd_forecast* ratio_forecast,
                                    kd_year_convention convention, kd_global** out);
KD_API kd_status kd_global_from_sums(const int* years, const kd_ssp* ssps, const double* sums,
                                     size_t n, const int* ratio_years, const double* ratios,
                                     size_t n_ratios, kd_year_convention convention,
                                     kd_global** out);
KD_API void kd_global_free(kd_global* global);
KD_API kd_status kd_global_get(const kd_global* global, int year, kd_ssp ssp, double* energy,
                               double* k, double* ratio_used, double* country_sum);
/* out must hold n rows. */
KD_API kd_status kd_global_table(const kd_global* global, const int* years, size_t n,
                                 kd_table_row* out);
/* comment (may be NULL) becomes a leading "# ..." line. */
KD_API kd_status kd_global_write_table(const kd_global* global, const int* years, size_t n,
                                       const char* path, const char* comment);

KD_API kd_status kd_calibrate_growth(double k_start, double k_end, int years, double* growth);
/* Reference defaults: pivot 2060 at K 0.7474, horizon 2100, rates calibrated
 * to K 0.7719 (fusion) and 0.7534 (baseline) in 2100. */
KD_API void kd_fusion_params_init(kd_fusion_params* params);
/* Writes up to capacity points; *count receives the full trajectory length. */
KD_API kd_status kd_fusion_trajectory(const kd_fusion_params* params, kd_trajectory_point* out,
                                      size_t capacity, size_t* count);
KD_API kd_status kd_fusion_write_csv(const kd_fusion_params* params, const char* path,
                                     const char* comment);

#ifdef __cplusplus
}
#endif

#endif /* KARDASHEV_KARDASHEV_H */
