// kardashev command-line front end. Everything numerical goes through the C
// library; this file only handles configuration, files and reporting.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kardashev/kardashev.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3, kCapability = 4 };

struct CliError : std::runtime_error {
  CliError(int code, const std::string& message) : std::runtime_error(message), code(code) {}
  int code;
};

int exit_code(kd_status s) {
  switch (s) {
    case KD_OK: return kOk;
    case KD_ERR_ARGUMENT: return kUsage;
    case KD_ERR_SCHEMA:
    case KD_ERR_VALIDATION:
    case KD_ERR_INTEGRITY:
    case KD_ERR_COMPLETENESS:
    case KD_ERR_MODEL_INTEGRITY:
    case KD_ERR_IO: return kData;
    case KD_ERR_CAPABILITY: return kCapability;
    case KD_ERR_DOMAIN:
    case KD_ERR_ESTIMATION:
    case KD_ERR_INTERNAL: return kNumerical;
  }
  return kNumerical;
}

void check(kd_status s) {
  if (s != KD_OK) throw CliError(exit_code(s), kd_last_error());
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
template <class T, void (*Free)(T*)>
using Handle = std::unique_ptr<T, Deleter<T, Free>>;

using Series = Handle<kd_series, kd_series_free>;
using Panel = Handle<kd_panel, kd_panel_free>;
using Scenario = Handle<kd_scenario, kd_scenario_free>;
using Forest = Handle<kd_forest, kd_forest_free>;
using Summary = Handle<kd_shap_summary, kd_shap_summary_free>;
using Arima = Handle<kd_arima, kd_arima_free>;
using Forecast = Handle<kd_forecast, kd_forecast_free>;
using Global = Handle<kd_global, kd_global_free>;

std::string fixed(double v, int decimals) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  return {buf, r.ptr};
}

std::string shortest(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, r.ptr};
}

std::string scientific(double v, int digits) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, digits);
  return {buf, r.ptr};
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// ---- configuration

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> convention;
  std::optional<int> threads;
  bool json = false;
};

struct ForestFlags {
  std::optional<int> n_trees, mtry, min_leaf, max_depth;
};

class Config {
 public:
  void load(const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw CliError(kData, path + ": cannot open config file");
    try {
      doc_ = json::parse(in);
    } catch (const json::exception& e) {
      throw CliError(kData, path + ": invalid JSON: " + e.what());
    }
    if (!doc_.is_object()) throw CliError(kData, path + ": config must be a JSON object");
    base_ = fs::path(path).parent_path();
  }

  template <class T>
  T get(const std::optional<T>& flag, const json::json_pointer& key, T fallback) const {
    if (flag) return *flag;
    if (doc_.contains(key)) {
      try {
        return doc_.at(key).get<T>();
      } catch (const json::exception& e) {
        throw CliError(kData, "config " + key.to_string() + ": " + e.what());
      }
    }
    return fallback;
  }

  // Config-file paths are relative to the config file.
  std::optional<std::string> path(const std::optional<std::string>& flag, const char* key) const {
    if (flag) return flag;
    const json::json_pointer ptr(std::string("/") + key);
    if (!doc_.contains(ptr)) return std::nullopt;
    fs::path p = doc_.at(ptr).get<std::string>();
    if (p.is_relative() && !base_.empty()) p = base_ / p;
    return p.string();
  }

  const json& doc() const { return doc_; }

 private:
  json doc_ = json::object();
  fs::path base_;
};

struct Context {
  Globals g;
  Config config;
  std::uint64_t seed = 42;
  fs::path out = ".";
  kd_year_convention convention = KD_YEAR_CIVIL365;
  std::string convention_name = "civil365";
  int threads = 0;
  json effective = json::object();  // hashed; excludes output location and threads

  void resolve() {
    config.load(g.config_path);
    seed = config.get<std::uint64_t>(g.seed, "/seed"_json_pointer, 42);
    out = config.get<std::string>(g.out, "/out"_json_pointer, ".");
    convention_name = config.get<std::string>(g.convention, "/year_convention"_json_pointer,
                                              "civil365");
    if (convention_name == "civil365") {
      convention = KD_YEAR_CIVIL365;
    } else if (convention_name == "julian") {
      convention = KD_YEAR_JULIAN;
    } else {
      throw CliError(kUsage, "year convention must be civil365 or julian, got " +
                                 convention_name);
    }
    threads = config.get<int>(g.threads, "/threads"_json_pointer, 0);
    if (threads < 0) throw CliError(kUsage, "--threads must be >= 0");
    effective["seed"] = seed;
    effective["year_convention"] = convention_name;
  }

  std::string hash() const { return hex64(fnv1a(effective.dump())); }

  std::string stamp() const { return "seed=" + std::to_string(seed) + " config_hash=" + hash(); }

  fs::path output(const std::string& name) const {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw CliError(kData, out.string() + ": cannot create output directory");
    return out / name;
  }

  std::string required_path(const std::optional<std::string>& flag, const char* key) {
    const auto p = config.path(flag, key);
    if (!p) throw CliError(kUsage, std::string("no ") + key + " file given (--" + key + ")");
    effective[key] = *p;
    return *p;
  }

  kd_forest_params forest_params(const ForestFlags& f) {
    kd_forest_params p;
    kd_forest_params_init(&p);
    p.n_trees = config.get<int>(f.n_trees, "/forest/n_trees"_json_pointer, p.n_trees);
    p.mtry = config.get<int>(f.mtry, "/forest/mtry"_json_pointer, p.mtry);
    p.min_leaf = config.get<int>(f.min_leaf, "/forest/min_leaf"_json_pointer, p.min_leaf);
    p.max_depth = config.get<int>(f.max_depth, "/forest/max_depth"_json_pointer, p.max_depth);
    p.seed = seed;
    p.n_threads = threads;
    effective["forest"] = {{"n_trees", p.n_trees},
                           {"mtry", p.mtry},
                           {"min_leaf", p.min_leaf},
                           {"max_depth", p.max_depth}};
    return p;
  }
};

void emit(const Context& ctx, const json& result, const std::string& text) {
  if (ctx.g.json) {
    std::cout << result.dump(2) << '\n';
  } else {
    std::cout << text;
  }
}

json forest_json(const kd_forest_params& p) {
  return {{"n_trees", p.n_trees}, {"mtry", p.mtry},      {"min_leaf", p.min_leaf},
          {"max_depth", p.max_depth}, {"seed", p.seed}};
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  out << j.dump(2) << '\n';
  if (!out) throw CliError(kData, path.string() + ": write failed");
}

std::ofstream open_csv(const fs::path& path, const Context& ctx) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError(kData, path.string() + ": cannot open for writing");
  out << "# " << ctx.stamp() << '\n';
  return out;
}

Panel load_panel(const std::string& path) {
  kd_panel* p = nullptr;
  check(kd_panel_load(path.c_str(), &p));
  return Panel(p);
}

// ---- validate

struct ValidateArgs {
  std::optional<std::string> panel, scenario, ratio;
};

int cmd_validate(Context& ctx, const ValidateArgs& a) {
  struct Item {
    const char* kind;
    std::optional<std::string> path;
  };
  std::vector<Item> items = {{"panel", ctx.config.path(a.panel, "panel")},
                             {"scenario", ctx.config.path(a.scenario, "scenario")},
                             {"ratio", ctx.config.path(a.ratio, "ratio")}};
  bool any = false;
  bool ok = true;
  json files = json::array();
  std::ostringstream text;
  for (const auto& it : items) {
    if (!it.path) continue;
    any = true;
    const char* path = it.path->c_str();
    kd_status s = KD_OK;
    std::size_t rows = 0;
    if (std::string(it.kind) == "panel") {
      kd_panel* p = nullptr;
      s = kd_panel_load(path, &p);
      rows = kd_panel_size(p);
      kd_panel_free(p);
    } else if (std::string(it.kind) == "scenario") {
      kd_scenario* p = nullptr;
      s = kd_scenario_load(path, &p);
      rows = kd_scenario_size(p);
      kd_scenario_free(p);
    } else {
      kd_series* p = nullptr;
      s = kd_series_load_ratio(path, &p);
      rows = kd_series_size(p);
      kd_series_free(p);
    }
    json f = {{"kind", it.kind}, {"path", *it.path}, {"ok", s == KD_OK}};
    if (s == KD_OK) {
      f["rows"] = rows;
      text << "PASS " << it.kind << ' ' << *it.path << " (" << rows << " rows)\n";
    } else {
      ok = false;
      f["error"] = kd_last_error();
      text << "FAIL " << it.kind << ' ' << *it.path << ": " << kd_last_error() << '\n';
    }
    files.push_back(f);
  }
  if (!any) throw CliError(kUsage, "nothing to validate: give --panel, --scenario or --ratio");
  emit(ctx, {{"command", "validate"}, {"ok", ok}, {"files", files}}, text.str());
  return ok ? kOk : kData;
}

// ---- train

struct TrainArgs {
  std::optional<std::string> panel, model;
  std::optional<double> holdout;
  ForestFlags forest;
};

constexpr const char* kReference = "R²=0.991, RMSE=1.05 (published full-data fit)";

int cmd_train(Context& ctx, const TrainArgs& a) {
  const auto panel_path = ctx.required_path(a.panel, "panel");
  const double holdout = ctx.config.get<double>(a.holdout, "/holdout"_json_pointer, 0.2);
  if (!(holdout > 0.0 && holdout < 1.0)) throw CliError(kUsage, "--holdout must be in (0, 1)");
  ctx.effective["holdout"] = holdout;
  auto params = ctx.forest_params(a.forest);

  auto panel = load_panel(panel_path);
  if (kd_panel_size(panel.get()) == 0) throw CliError(kData, panel_path + ": panel has no rows");

  kd_panel *train_raw = nullptr, *test_raw = nullptr;
  check(kd_panel_split(panel.get(), holdout, ctx.seed, &train_raw, &test_raw));
  Panel train(train_raw), test(test_raw);

  kd_forest* f = nullptr;
  const kd_status st = kd_forest_train(train.get(), &params, &f);
  if (st != KD_OK) {
    const int code = exit_code(st) == kData ? kData : kNumerical;
    throw CliError(code, std::string("training failed: ") + kd_last_error());
  }
  Forest forest(f);
  kd_metrics m{};
  check(kd_forest_evaluate(forest.get(), test.get(), &m));
  const double oob = kd_forest_oob_rmse(forest.get());

  json meta = {{"seed", ctx.seed},
               {"config_hash", ctx.hash()},
               {"holdout", holdout},
               {"n_train", kd_panel_size(train.get())},
               {"n_test", kd_panel_size(test.get())},
               {"test_r2", m.r2},
               {"test_rmse", m.rmse},
               {"reference", kReference}};
  const fs::path model_path =
      a.model ? fs::path(*a.model) : ctx.output("model.json");
  check(kd_forest_save(forest.get(), model_path.string().c_str(), meta.dump().c_str()));

  json result = {{"command", "train"},
                 {"seed", ctx.seed},
                 {"config_hash", ctx.hash()},
                 {"forest", forest_json(params)},
                 {"n_train", kd_panel_size(train.get())},
                 {"n_test", kd_panel_size(test.get())},
                 {"r2", m.r2},
                 {"rmse", m.rmse},
                 {"oob_rmse", std::isnan(oob) ? json(nullptr) : json(oob)},
                 {"model", model_path.string()},
                 {"reference", kReference}};
  write_json_file(ctx.output("train_metrics.json"), result);

  std::ostringstream text;
  text << "rows: " << kd_panel_size(train.get()) << " train, " << kd_panel_size(test.get())
       << " test (seed " << ctx.seed << ")\n"
       << "R2:       " << fixed(m.r2, 4) << '\n'
       << "RMSE:     " << fixed(m.rmse, 4) << " EJ\n"
       << "OOB RMSE: " << (std::isnan(oob) ? std::string("n/a") : fixed(oob, 4)) << " EJ\n"
       << "model:    " << model_path.string() << '\n'
       << "reference: " << kReference << '\n'
       << ctx.stamp() << '\n';
  emit(ctx, result, text.str());
  return kOk;
}

// ---- shap

struct ShapArgs {
  std::optional<std::string> panel, model;
  std::string method = "path";
};

int cmd_shap(Context& ctx, const ShapArgs& a) {
  const auto panel_path = ctx.required_path(a.panel, "panel");
  const std::string model_path =
      ctx.config.path(a.model, "model").value_or((ctx.out / "model.json").string());
  ctx.effective["model"] = model_path;
  ctx.effective["method"] = a.method;

  kd_forest* f = nullptr;
  check(kd_forest_load(model_path.c_str(), &f));
  Forest forest(f);
  auto panel = load_panel(panel_path);
  if (kd_panel_size(panel.get()) == 0) throw CliError(kData, panel_path + ": panel has no rows");

  kd_shap_summary* s = nullptr;
  const kd_status st =
      kd_shap_summarize(forest.get(), panel.get(), ctx.threads, a.method == "exact", &s);
  if (st == KD_ERR_CAPABILITY) {
    throw CliError(kCapability,
                   std::string(kd_last_error()) + " (rerun with --method path)");
  }
  check(st);
  Summary summary(s);
  const auto csv = ctx.output("shap_summary.csv");
  check(kd_shap_summary_write_csv(summary.get(), csv.string().c_str(), ctx.stamp().c_str()));

  json ranking = json::array();
  std::ostringstream text;
  text << "top features by mean |SHAP| (EJ):\n";
  for (std::size_t i = 0; i < kd_shap_summary_size(summary.get()); ++i) {
    const char* name = nullptr;
    double mean_abs = 0.0;
    int rank = 0;
    check(kd_shap_summary_entry(summary.get(), i, &name, &mean_abs, &rank));
    ranking.push_back({{"feature", name}, {"mean_abs_shap", mean_abs}, {"rank", rank}});
    if (i < 3) text << "  " << rank << ". " << name << "  " << fixed(mean_abs, 4) << '\n';
  }
  text << "summary: " << csv.string() << '\n' << ctx.stamp() << '\n';
  emit(ctx,
       {{"command", "shap"},
        {"seed", ctx.seed},
        {"config_hash", ctx.hash()},
        {"method", a.method},
        {"rows", kd_panel_size(panel.get())},
        {"ranking", ranking},
        {"summary", csv.string()}},
       text.str());
  return kOk;
}

// ---- arima

struct ArimaArgs {
  std::optional<std::string> ratio, order;
  std::optional<int> p_max, d_max, q_max, horizon;
};

kd_arima_order parse_order(const std::string& text) {
  kd_arima_order o{};
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> o.p >> c1 >> o.d >> c2 >> o.q) || c1 != ',' || c2 != ',' || !in.eof()) {
    throw CliError(kUsage, "--order must look like p,d,q, got '" + text + "'");
  }
  return o;
}

struct RatioModel {
  Series ratio;
  Arima fit;
  Forecast forecast;
  kd_arima_order order{};
  bool selected = false;
};

RatioModel fit_ratio(Context& ctx, const ArimaArgs& a, const std::string& path,
                     std::optional<int> horizon_to_year) {
  RatioModel rm;
  kd_series* s = nullptr;
  check(kd_series_load_ratio(path.c_str(), &s));
  rm.ratio.reset(s);

  const auto order_text = ctx.config.get<std::string>(a.order, "/arima/order"_json_pointer, "");
  if (!order_text.empty()) {
    rm.order = parse_order(order_text);
    ctx.effective["arima"] = {{"order", order_text}};
  } else {
    const int p_max = ctx.config.get<int>(a.p_max, "/arima/p_max"_json_pointer, 1);
    const int d_max = ctx.config.get<int>(a.d_max, "/arima/d_max"_json_pointer, 2);
    const int q_max = ctx.config.get<int>(a.q_max, "/arima/q_max"_json_pointer, 1);
    ctx.effective["arima"] = {{"p_max", p_max}, {"d_max", d_max}, {"q_max", q_max}};
    check(kd_arima_select(rm.ratio.get(), p_max, d_max, q_max, &rm.order));
    rm.selected = true;
  }

  const int last = kd_series_start_year(rm.ratio.get()) +
                   static_cast<int>(kd_series_size(rm.ratio.get())) - 1;
  int horizon = 0;
  if (horizon_to_year) {
    horizon = *horizon_to_year - last;
  } else {
    horizon = ctx.config.get<int>(a.horizon, "/arima/horizon"_json_pointer, 2060 - last);
  }
  if (horizon < 1) throw CliError(kUsage, "forecast horizon must be at least 1 year");
  ctx.effective["arima"]["horizon"] = horizon;

  kd_arima* fit = nullptr;
  check(kd_arima_fit(rm.ratio.get(), rm.order, &fit));
  rm.fit.reset(fit);
  kd_forecast* fc = nullptr;
  check(kd_arima_forecast(rm.fit.get(), rm.ratio.get(), horizon, &fc));
  rm.forecast.reset(fc);
  return rm;
}

json arima_json(const RatioModel& rm) {
  const double* ar = nullptr;
  const double* ma = nullptr;
  const std::size_t np = kd_arima_ar(rm.fit.get(), &ar);
  const std::size_t nq = kd_arima_ma(rm.fit.get(), &ma);
  json j = {{"order", {rm.order.p, rm.order.d, rm.order.q}},
            {"selected", rm.selected},
            {"ar", std::vector<double>(ar, ar + np)},
            {"ma", std::vector<double>(ma, ma + nq)},
            {"sigma2", kd_arima_sigma2(rm.fit.get())},
            {"aicc", kd_arima_aicc(rm.fit.get())}};
  if (kd_arima_has_intercept(rm.fit.get())) j["intercept"] = kd_arima_intercept(rm.fit.get());
  return j;
}

void write_forecast_csv(const fs::path& path, const Context& ctx, const kd_forecast* fc) {
  auto out = open_csv(path, ctx);
  out << "year,point,lower95,upper95\n";
  for (int h = 0; h < kd_forecast_horizon(fc); ++h) {
    double p, lo, hi;
    check(kd_forecast_get(fc, h, &p, &lo, &hi));
    out << kd_forecast_start_year(fc) + h << ',' << shortest(p) << ',' << shortest(lo) << ','
        << shortest(hi) << '\n';
  }
  if (!out) throw CliError(kData, path.string() + ": write failed");
}

void write_acf_csv(const fs::path& path, const Context& ctx, const kd_series* ratio) {
  kd_series* d = nullptr;
  check(kd_series_difference(ratio, 1, &d));
  Series diff(d);
  const int max_lag =
      std::min<int>(10, static_cast<int>(kd_series_size(diff.get())) - 2);
  if (max_lag < 1) throw CliError(kData, "ratio series too short for identification tables");
  std::vector<double> acf(max_lag + 1), pacf(max_lag + 1), dacf(max_lag + 1), dpacf(max_lag + 1);
  check(kd_series_acf(ratio, max_lag, acf.data()));
  check(kd_series_pacf(ratio, max_lag, pacf.data()));
  check(kd_series_acf(diff.get(), max_lag, dacf.data()));
  check(kd_series_pacf(diff.get(), max_lag, dpacf.data()));
  auto out = open_csv(path, ctx);
  out << "lag,acf,pacf,acf_diff1,pacf_diff1\n";
  for (int k = 0; k <= max_lag; ++k) {
    out << k << ',' << shortest(acf[k]) << ',' << shortest(pacf[k]) << ',' << shortest(dacf[k])
        << ',' << shortest(dpacf[k]) << '\n';
  }
  if (!out) throw CliError(kData, path.string() + ": write failed");
}

int cmd_arima(Context& ctx, const ArimaArgs& a) {
  if (a.horizon && *a.horizon < 1) throw CliError(kUsage, "--horizon must be at least 1");
  const auto ratio_path = ctx.required_path(a.ratio, "ratio");
  auto rm = fit_ratio(ctx, a, ratio_path, std::nullopt);

  const auto fc_path = ctx.output("arima_forecast.csv");
  const auto acf_path = ctx.output("acf_pacf.csv");
  write_forecast_csv(fc_path, ctx, rm.forecast.get());
  write_acf_csv(acf_path, ctx, rm.ratio.get());

  const json model = arima_json(rm);
  std::ostringstream text;
  text << "order:     ARIMA(" << rm.order.p << ',' << rm.order.d << ',' << rm.order.q << ")"
       << (rm.selected ? " (selected by AICc)" : " (fixed)") << '\n';
  for (std::size_t i = 0; i < model["ar"].size(); ++i) {
    text << "ar" << i + 1 << ":       " << shortest(model["ar"][i].get<double>()) << '\n';
  }
  for (std::size_t i = 0; i < model["ma"].size(); ++i) {
    text << "ma" << i + 1 << ":       " << shortest(model["ma"][i].get<double>()) << '\n';
  }
  if (model.contains("intercept")) {
    text << "intercept: " << shortest(model["intercept"].get<double>()) << '\n';
  }
  text << "sigma2:    " << scientific(kd_arima_sigma2(rm.fit.get()), 4) << '\n'
       << "AICc:      " << fixed(kd_arima_aicc(rm.fit.get()), 3) << '\n';
  const int horizon = kd_forecast_horizon(rm.forecast.get());
  double p, lo, hi;
  check(kd_forecast_get(rm.forecast.get(), horizon - 1, &p, &lo, &hi));
  text << "forecast " << kd_forecast_start_year(rm.forecast.get()) + horizon - 1 << ": "
       << fixed(p, 4) << " [" << fixed(lo, 4) << ", " << fixed(hi, 4) << "]\n"
       << "files:     " << fc_path.string() << ", " << acf_path.string() << '\n'
       << ctx.stamp() << '\n';
  emit(ctx,
       {{"command", "arima"},
        {"seed", ctx.seed},
        {"config_hash", ctx.hash()},
        {"model", model},
        {"horizon", horizon},
        {"forecast", fc_path.string()},
        {"acf_pacf", acf_path.string()}},
       text.str());
  return kOk;
}

// ---- fusion

struct FusionArgs {
  std::optional<int> pivot_year, horizon_year;
  std::optional<double> k_pivot, g_fusion, g_baseline;
};

kd_fusion_params fusion_params(Context& ctx, const FusionArgs& a,
                               std::optional<double> k_pivot_override, bool record = true) {
  kd_fusion_params fp;
  kd_fusion_params_init(&fp);
  fp.pivot_year = ctx.config.get<int>(a.pivot_year, "/fusion/pivot_year"_json_pointer,
                                      fp.pivot_year);
  fp.horizon_year = ctx.config.get<int>(a.horizon_year, "/fusion/horizon_year"_json_pointer,
                                        fp.horizon_year);
  fp.k_pivot = ctx.config.get<double>(a.k_pivot ? a.k_pivot : k_pivot_override,
                                      "/fusion/k_pivot"_json_pointer, fp.k_pivot);
  fp.growth_with_fusion = ctx.config.get<double>(
      a.g_fusion, "/fusion/growth_with_fusion"_json_pointer, fp.growth_with_fusion);
  fp.growth_baseline = ctx.config.get<double>(
      a.g_baseline, "/fusion/growth_baseline"_json_pointer, fp.growth_baseline);
  if (!record) return fp;
  ctx.effective["fusion"] = {{"pivot_year", fp.pivot_year},
                             {"horizon_year", fp.horizon_year},
                             {"k_pivot", fp.k_pivot},
                             {"growth_with_fusion", fp.growth_with_fusion},
                             {"growth_baseline", fp.growth_baseline}};
  return fp;
}

std::vector<kd_trajectory_point> trajectory(const kd_fusion_params& fp) {
  std::size_t n = 0;
  check(kd_fusion_trajectory(&fp, nullptr, 0, &n));
  std::vector<kd_trajectory_point> pts(n);
  check(kd_fusion_trajectory(&fp, pts.data(), pts.size(), &n));
  return pts;
}

json fusion_json(const kd_fusion_params& fp, const std::vector<kd_trajectory_point>& pts) {
  return {{"pivot_year", fp.pivot_year},
          {"k_pivot", fp.k_pivot},
          {"growth_with_fusion", fp.growth_with_fusion},
          {"growth_baseline", fp.growth_baseline},
          {"horizon_year", fp.horizon_year},
          {"k_with_fusion_end", pts.back().k_with_fusion},
          {"k_baseline_end", pts.back().k_baseline}};
}

int cmd_fusion(Context& ctx, const FusionArgs& a) {
  const auto fp = fusion_params(ctx, a, std::nullopt);
  const auto pts = trajectory(fp);
  const auto path = ctx.output("k_trajectory.csv");
  check(kd_fusion_write_csv(&fp, path.string().c_str(), ctx.stamp().c_str()));

  std::ostringstream text;
  text << "pivot " << fp.pivot_year << ": K " << fixed(fp.k_pivot, 4) << '\n'
       << "with fusion: g " << fixed(fp.growth_with_fusion, 6) << ", K(" << fp.horizon_year
       << ") " << fixed(pts.back().k_with_fusion, 4) << '\n'
       << "baseline:    g " << fixed(fp.growth_baseline, 6) << ", K(" << fp.horizon_year
       << ") " << fixed(pts.back().k_baseline, 4) << '\n'
       << "trajectory: " << path.string() << '\n'
       << ctx.stamp() << '\n';
  emit(ctx,
       {{"command", "fusion"},
        {"seed", ctx.seed},
        {"config_hash", ctx.hash()},
        {"fusion", fusion_json(fp, pts)},
        {"trajectory", path.string()}},
       text.str());
  return kOk;
}

// ---- pipeline

struct PipelineArgs {
  std::optional<std::string> panel, scenario, ratio;
  std::optional<std::vector<int>> years;
  bool fusion = false;
  ForestFlags forest;
  ArimaArgs arima;
  FusionArgs fusion_args;
};

int cmd_pipeline(Context& ctx, const PipelineArgs& a) {
  const auto panel_path = ctx.required_path(a.panel, "panel");
  const auto scenario_path = ctx.required_path(a.scenario, "scenario");
  const auto ratio_path = ctx.required_path(a.ratio, "ratio");
  auto params = ctx.forest_params(a.forest);
  const auto years = ctx.config.get<std::vector<int>>(
      a.years, "/forecast_years"_json_pointer, {2025, 2030, 2035, 2040, 2045, 2050, 2055, 2060});
  if (years.empty()) throw CliError(kUsage, "no forecast years requested");
  ctx.effective["forecast_years"] = years;
  if (a.fusion) {
    fusion_params(ctx, a.fusion_args, std::nullopt);
    if (!a.fusion_args.k_pivot && !ctx.config.doc().contains("/fusion/k_pivot"_json_pointer)) {
      ctx.effective["fusion"]["k_pivot"] = "run";
    }
  }

  auto panel = load_panel(panel_path);
  if (kd_panel_size(panel.get()) == 0) throw CliError(kData, panel_path + ": panel has no rows");
  kd_scenario* sc = nullptr;
  check(kd_scenario_load(scenario_path.c_str(), &sc));
  Scenario scenario(sc);
  int first_year = 0, last_year = 0;
  check(kd_scenario_year_range(scenario.get(), &first_year, &last_year));

  kd_forest* f = nullptr;
  const kd_status st = kd_forest_train(panel.get(), &params, &f);
  if (st != KD_OK) {
    const int code = exit_code(st) == kData ? kData : kNumerical;
    throw CliError(code, std::string("training failed: ") + kd_last_error());
  }
  Forest forest(f);

  auto rm = fit_ratio(ctx, a.arima, ratio_path, last_year);

  kd_global* g = nullptr;
  check(kd_global_forecast(forest.get(), scenario.get(), rm.ratio.get(), rm.forecast.get(),
                           ctx.convention, &g));
  Global global(g);

  std::vector<kd_table_row> rows(years.size());
  check(kd_global_table(global.get(), years.data(), years.size(), rows.data()));
  const auto table_path = ctx.output("table1.csv");
  check(kd_global_write_table(global.get(), years.data(), years.size(),
                              table_path.string().c_str(), ctx.stamp().c_str()));
  const auto ratio_path_out = ctx.output("ratio_forecast.csv");
  write_forecast_csv(ratio_path_out, ctx, rm.forecast.get());

  json table = json::array();
  for (const auto& r : rows) {
    table.push_back({{"year", r.year},
                     {"ssp126_ej", r.energy[0]},
                     {"ssp245_ej", r.energy[1]},
                     {"ssp370_ej", r.energy[2]},
                     {"ssp585_ej", r.energy[3]},
                     {"k", r.k}});
  }
  json result = {{"command", "pipeline"},
                 {"seed", ctx.seed},
                 {"config_hash", ctx.hash()},
                 {"year_convention", ctx.convention_name},
                 {"forest", forest_json(params)},
                 {"oob_rmse", kd_forest_oob_rmse(forest.get())},
                 {"arima", arima_json(rm)},
                 {"scenario_years", {first_year, last_year}},
                 {"table", table},
                 {"files", {table_path.string(), ratio_path_out.string()}}};

  std::optional<std::vector<kd_trajectory_point>> pts;
  kd_fusion_params fp{};
  if (a.fusion) {
    // The trajectory starts from this run's own SSP126 K at the pivot year.
    kd_fusion_params defaults;
    kd_fusion_params_init(&defaults);
    const int pivot = ctx.config.get<int>(a.fusion_args.pivot_year,
                                          "/fusion/pivot_year"_json_pointer, defaults.pivot_year);
    double k_pivot = 0.0;
    check(kd_global_get(global.get(), pivot, KD_SSP126, nullptr, &k_pivot, nullptr, nullptr));
    fp = fusion_params(ctx, a.fusion_args, k_pivot, false);
    pts = trajectory(fp);
    const auto traj_path = ctx.output("k_trajectory.csv");
    check(kd_fusion_write_csv(&fp, traj_path.string().c_str(), ctx.stamp().c_str()));
    result["fusion"] = fusion_json(fp, *pts);
    result["files"].push_back(traj_path.string());
  }
  write_json_file(ctx.output("pipeline_run.json"), [&] {
    json manifest = result;
    manifest.erase("files");
    return manifest;
  }());

  const auto& last = rows.back();
  std::ostringstream text;
  text << "ratio model: ARIMA(" << rm.order.p << ',' << rm.order.d << ',' << rm.order.q
       << "), forecast to " << last_year << '\n'
       << "global energy " << last.year << " (EJ):\n";
  for (int i = 0; i < 4; ++i) {
    text << "  " << kd_ssp_name(static_cast<kd_ssp>(i)) << ": " << fixed(last.energy[i], 2)
         << '\n';
  }
  text << "K " << last.year << " (SSP126): " << fixed(last.k, 5) << '\n'
       << "table: " << table_path.string() << '\n';
  if (pts) {
    text << "fusion K(" << fp.horizon_year << "): " << fixed(pts->back().k_with_fusion, 4)
         << " with, " << fixed(pts->back().k_baseline, 4) << " without\n";
  }
  text << ctx.stamp() << '\n';
  emit(ctx, result, text.str());
  return kOk;
}

// ---- kardashev

struct ConvertArgs {
  std::optional<double> ej, watts, k;
};

int cmd_kardashev(Context& ctx, const ConvertArgs& a) {
  const int given = (a.ej ? 1 : 0) + (a.watts ? 1 : 0) + (a.k ? 1 : 0);
  if (given != 1) throw CliError(kUsage, "give exactly one of --ej, --watts, --k");
  double ej = 0.0, watts = 0.0, k = 0.0;
  auto usage = [](kd_status s) {
    if (s != KD_OK) throw CliError(kUsage, kd_last_error());
  };
  if (a.ej) {
    ej = *a.ej;
    usage(kd_power_from_annual_energy(ej, ctx.convention, &watts));
    usage(kd_k_from_power(watts, &k));
  } else if (a.watts) {
    watts = *a.watts;
    usage(kd_k_from_power(watts, &k));
    usage(kd_annual_energy_from_power(watts, ctx.convention, &ej));
  } else {
    k = *a.k;
    usage(kd_power_from_k(k, &watts));
    usage(kd_annual_energy_from_power(watts, ctx.convention, &ej));
  }
  std::ostringstream text;
  text << "energy: " << shortest(ej) << " EJ/yr\n"
       << "power:  " << scientific(watts, 6) << " W\n"
       << "K:      " << fixed(k, 5) << '\n'
       << "year:   " << ctx.convention_name << " (" << shortest(kd_seconds_per_year(ctx.convention))
       << " s)\n";
  emit(ctx,
       {{"command", "kardashev"},
        {"year_convention", ctx.convention_name},
        {"exajoules_per_year", ej},
        {"watts", watts},
        {"k", k}},
       text.str());
  return kOk;
}

void add_forest_flags(CLI::App* cmd, ForestFlags& f) {
  cmd->add_option("--trees", f.n_trees, "Number of trees (default 500)");
  cmd->add_option("--mtry", f.mtry, "Features tried per split (default ceil(p/3))");
  cmd->add_option("--min-leaf", f.min_leaf, "Minimum rows per leaf (default 2)");
  cmd->add_option("--max-depth", f.max_depth, "Maximum depth, 0 for unlimited");
}

void add_arima_flags(CLI::App* cmd, ArimaArgs& a) {
  cmd->add_option("--p-max", a.p_max, "Largest AR order searched (default 1)");
  cmd->add_option("--d-max", a.d_max, "Largest differencing order (default 2)");
  cmd->add_option("--q-max", a.q_max, "Largest MA order searched (default 1)");
  cmd->add_option("--order", a.order, "Fixed order p,d,q instead of selection");
}

void add_fusion_flags(CLI::App* cmd, FusionArgs& a) {
  cmd->add_option("--pivot-year", a.pivot_year, "Year fusion arrives (default 2060)");
  cmd->add_option("--horizon-year", a.horizon_year, "Last year (default 2100)");
  cmd->add_option("--k-pivot", a.k_pivot, "K at the pivot year");
  cmd->add_option("--g-fusion", a.g_fusion, "Yearly power growth with fusion");
  cmd->add_option("--g-baseline", a.g_baseline, "Yearly power growth without fusion");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-consumption forecasting and Kardashev-index projection"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kd_version());

  Context ctx;
  app.add_option("--config", ctx.g.config_path, "JSON config file; flags override it");
  app.add_option("--seed", ctx.g.seed, "Random seed (default 42)");
  app.add_option("--out", ctx.g.out, "Output directory (default .)");
  app.add_option("--year-convention", ctx.g.convention, "civil365 (default) or julian")
      ->check(CLI::IsMember({"civil365", "julian"}));
  app.add_option("--threads", ctx.g.threads, "Worker threads, 0 for all cores");
  app.add_flag("--json", ctx.g.json, "Machine-readable output");

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Check input files against their schemas");
  validate->add_option("--panel", va.panel, "Historical panel CSV");
  validate->add_option("--scenario", va.scenario, "Scenario driver CSV");
  validate->add_option("--ratio", va.ratio, "Country-share ratio CSV");

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train and evaluate the energy model");
  train->add_option("--panel", ta.panel, "Historical panel CSV");
  train->add_option("--model", ta.model, "Model output path (default <out>/model.json)");
  train->add_option("--holdout", ta.holdout, "Held-out row fraction (default 0.2)");
  add_forest_flags(train, ta.forest);

  ShapArgs sa;
  auto* shap = app.add_subcommand("shap", "Rank drivers by mean absolute Shapley value");
  shap->add_option("--panel", sa.panel, "Rows to explain");
  shap->add_option("--model", sa.model, "Model file (default <out>/model.json)");
  shap->add_option("--method", sa.method, "path (default) or exact")
      ->check(CLI::IsMember({"path", "exact"}));

  ArimaArgs aa;
  auto* arima = app.add_subcommand("arima", "Fit and forecast the country-share ratio");
  arima->add_option("--ratio", aa.ratio, "Ratio CSV");
  arima->add_option("--horizon", aa.horizon, "Years ahead (default: through 2060)");
  add_arima_flags(arima, aa);

  PipelineArgs pa;
  auto* pipeline = app.add_subcommand("pipeline", "Run the full forecast");
  pipeline->add_option("--panel", pa.panel, "Historical panel CSV");
  pipeline->add_option("--scenario", pa.scenario, "Scenario driver CSV");
  pipeline->add_option("--ratio", pa.ratio, "Ratio CSV");
  pipeline->add_option("--years", pa.years, "Table years (default 2025..2060 by 5)");
  pipeline->add_flag("--fusion", pa.fusion, "Also write the fusion K trajectories");
  add_forest_flags(pipeline, pa.forest);
  add_arima_flags(pipeline, pa.arima);
  add_fusion_flags(pipeline, pa.fusion_args);

  ConvertArgs ca;
  auto* convert = app.add_subcommand("kardashev", "Convert between EJ/yr, watts and K");
  auto* ej = convert->add_option("--ej", ca.ej, "Annual energy in EJ");
  auto* watts = convert->add_option("--watts", ca.watts, "Mean power in W");
  auto* k = convert->add_option("--k", ca.k, "Kardashev index");
  ej->excludes(watts)->excludes(k);
  watts->excludes(k);

  FusionArgs fa;
  auto* fusion = app.add_subcommand("fusion", "Extrapolate K with and without fusion");
  add_fusion_flags(fusion, fa);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    ctx.resolve();
    if (*validate) return cmd_validate(ctx, va);
    if (*train) return cmd_train(ctx, ta);
    if (*shap) return cmd_shap(ctx, sa);
    if (*arima) return cmd_arima(ctx, aa);
    if (*pipeline) return cmd_pipeline(ctx, pa);
    if (*convert) return cmd_kardashev(ctx, ca);
    if (*fusion) return cmd_fusion(ctx, fa);
  } catch (const CliError& e) {
    if (ctx.g.json) {
      std::cout << json{{"error", {{"exit_code", e.code}, {"message", e.what()}}}}.dump(2)
                << '\n';
    }
    std::cerr << "error: " << e.what() << '\n';
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}
