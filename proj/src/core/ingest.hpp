#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/features.hpp"
#include "core/forest.hpp"
#include "core/timeseries.hpp"

// Loaders for the three input files. All are headered UTF-8 CSV with '.' as
// the decimal separator:
//
//   panel:    country,year,<10 driver columns>,energy_ej
//   scenario: ssp,country,year,<10 driver columns>
//   ratio:    year,ratio
//
// Panel and scenario files may carry extra numeric driver columns after the
// required ones; they become additional named features. Nothing is imputed:
// any missing, malformed or out-of-range value rejects the file with its
// file name, line and column.

namespace kardashev::ingest {

enum class Ssp { k126, k245, k370, k585 };

inline constexpr std::array<Ssp, 4> kAllSsps = {Ssp::k126, Ssp::k245, Ssp::k370, Ssp::k585};

std::string_view to_string(Ssp ssp);
std::optional<Ssp> parse_ssp(std::string_view text);

struct PanelRecord {
  std::string country;
  int year = 0;
  FeatureVector drivers;
  double energy = 0.0;  // EJ per year

  friend bool operator==(const PanelRecord&, const PanelRecord&) = default;
};

struct DriverScenario {
  Ssp ssp = Ssp::k126;
  std::string country;
  int year = 0;
  FeatureVector drivers;

  friend bool operator==(const DriverScenario&, const DriverScenario&) = default;
};

// Share of world energy consumed by the forecast countries; every value in
// (0, 1].
class RatioSeries {
 public:
  explicit RatioSeries(ts::AnnualSeries series);
  const ts::AnnualSeries& series() const noexcept { return series_; }

 private:
  ts::AnnualSeries series_;
};

std::string panel_header();
std::string scenario_header();

std::vector<PanelRecord> read_panel(std::istream& in, const std::string& name);
std::vector<DriverScenario> read_scenario(std::istream& in, const std::string& name);
RatioSeries read_ratio(std::istream& in, const std::string& name);

std::vector<PanelRecord> load_panel(const std::string& path);
std::vector<DriverScenario> load_scenario(const std::string& path);
RatioSeries load_ratio(const std::string& path);

void write_panel(std::ostream& out, std::span<const PanelRecord> records);
void write_scenario(std::ostream& out, std::span<const DriverScenario> rows);
void write_ratio(std::ostream& out, const RatioSeries& ratio);

struct DesignMatrix {
  forest::FeatureMatrix x;
  std::vector<double> y;
  std::vector<std::string> feature_names;
};

// Rows in input order, columns in schema order followed by any extra
// features.
DesignMatrix assemble_matrix(std::span<const PanelRecord> records);

// Driver rows laid out for a model with the given feature names. Throws
// SchemaError for a feature a row does not carry.
forest::FeatureMatrix assemble_drivers(std::span<const FeatureVector> drivers,
                                       std::span<const std::string> feature_names);

FeatureVector drivers_from_row(std::span<const double> row,
                               std::span<const std::string> feature_names);

}  // namespace kardashev::ingest
