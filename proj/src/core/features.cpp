#include "core/features.hpp"

#include <cmath>

#include "core/error.hpp"

namespace kardashev {

namespace {

template <class Vector>
auto core_slot(Vector& v, std::string_view name) -> decltype(&v.gdp) {
  if (name == "gdp_usd2015") return &v.gdp;
  if (name == "population") return &v.population;
  if (name == "urban_population") return &v.urban_population;
  if (name == "urbanization") return &v.urbanization;
  if (name == "temperature_k") return &v.temperature;
  if (name == "precipitation_mm") return &v.precipitation;
  if (name == "co2_ppm") return &v.co2;
  if (name == "ch4_ppb") return &v.ch4;
  if (name == "aerosol_aod550") return &v.aerosol_aod550;
  if (name == "water_vapor_kgm2") return &v.water_vapor;
  return nullptr;
}

}  // namespace

double FeatureVector::get(std::string_view name) const {
  if (const double* slot = core_slot(*this, name)) return *slot;
  if (auto it = extra.find(name); it != extra.end()) return it->second;
  throw SchemaError("unknown feature '" + std::string(name) + "'");
}

void FeatureVector::set(std::string_view name, double value, bool allow_extra) {
  if (double* slot = core_slot(*this, name)) {
    *slot = value;
    return;
  }
  if (!allow_extra) throw SchemaError("unknown feature '" + std::string(name) + "'");
  extra.insert_or_assign(std::string(name), value);
}

std::vector<std::string> FeatureVector::names() const {
  std::vector<std::string> out(kCoreFeatureNames.begin(), kCoreFeatureNames.end());
  for (const auto& [name, value] : extra) out.push_back(name);
  return out;
}

std::pair<std::string, std::string> FeatureVector::check() const {
  for (const auto& name : names()) {
    if (!std::isfinite(get(name))) return {name, "value is not finite"};
  }
  if (urban_population < 0.0) return {"urban_population", "must be non-negative"};
  if (population < urban_population) {
    return {"urban_population", "urban population exceeds population"};
  }
  if (urbanization < 0.0 || urbanization > 1.0) return {"urbanization", "must lie in [0, 1]"};
  return {};
}

}  // namespace kardashev
