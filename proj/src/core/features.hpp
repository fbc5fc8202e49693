#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kardashev {

// Column names of the driver columns, in schema order. Units: constant-2015
// USD, persons, persons, fraction, kelvin, mm/yr, ppm, ppb, dimensionless,
// kg/m^2.
inline constexpr std::array<std::string_view, 10> kCoreFeatureNames = {
    "gdp_usd2015",     "population", "urban_population", "urbanization",
    "temperature_k",   "precipitation_mm", "co2_ppm",    "ch4_ppb",
    "aerosol_aod550",  "water_vapor_kgm2",
};

// Drivers of national energy consumption for one country-year. Additional
// named drivers beyond the core ten live in `extra`.
struct FeatureVector {
  double gdp = 0.0;
  double population = 0.0;
  double urban_population = 0.0;
  double urbanization = 0.0;
  double temperature = 0.0;
  double precipitation = 0.0;
  double co2 = 0.0;
  double ch4 = 0.0;
  double aerosol_aod550 = 0.0;
  double water_vapor = 0.0;
  std::map<std::string, double, std::less<>> extra;

  // Throws SchemaError for an unknown name.
  double get(std::string_view name) const;
  // Throws SchemaError for an unknown name that is not a core feature and
  // allow_extra is false.
  void set(std::string_view name, double value, bool allow_extra = true);

  // Names of every feature present: the core ten then `extra` in key order.
  std::vector<std::string> names() const;

  // {column, reason} of the first invariant breach; both empty when valid.
  std::pair<std::string, std::string> check() const;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

}  // namespace kardashev
