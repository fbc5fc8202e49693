#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "core/arima.hpp"
#include "core/forest.hpp"
#include "core/ingest.hpp"
#include "core/units.hpp"

namespace kardashev::pipeline {

using ingest::Ssp;

// Keyed by (pathway, year).
using CountrySums = std::map<std::pair<Ssp, int>, double>;

struct GlobalEntry {
  double energy = 0.0;       // EJ per year, world total
  double k = 0.0;            // Kardashev index of `energy`
  double ratio_used = 0.0;   // forecast-country share of world energy
  double country_sum = 0.0;  // EJ per year over the forecast countries
};

struct GlobalForecast {
  units::YearConvention convention = units::YearConvention::kCivil365;
  std::map<std::pair<int, Ssp>, GlobalEntry> entries;  // keyed by (year, pathway)

  const GlobalEntry& at(int year, Ssp ssp) const;
};

struct TableRow {
  int year = 0;
  std::array<double, 4> energy{};  // SSP126, SSP245, SSP370, SSP585
  double k = 0.0;                  // from the SSP126 energy
};

struct FusionScenario {
  int pivot_year = 2060;
  double k_pivot = 0.7474;
  double growth_with_fusion = 0.0;  // per-year power growth rate
  double growth_baseline = 0.0;
  int horizon_year = 2100;

  // Throws ArgumentError unless growth_with_fusion > growth_baseline >= 0,
  // horizon_year > pivot_year and k_pivot is finite.
  void validate() const;
};

struct TrajectoryPoint {
  int year = 0;
  double k_with_fusion = 0.0;
  double k_baseline = 0.0;
};

// Reference endpoints of the fusion scenario and the rates they imply over
// 2060..2100.
inline constexpr double kReferencePivotK = 0.7474;
inline constexpr double kReferenceFusionK2100 = 0.7719;
inline constexpr double kReferenceBaselineK2100 = 0.7534;
FusionScenario default_fusion_scenario();

// Sum of forest predictions over countries for every (pathway, year).
// Throws CompletenessError listing the missing (pathway, country, year)
// combinations when the rows do not form a full grid.
CountrySums predict_countries(const forest::ForestModel& model,
                              std::span<const ingest::DriverScenario> scenario);

// Observed ratios where history covers a year, ARIMA point forecasts after.
std::map<int, double> ratio_by_year(const ingest::RatioSeries& history,
                                    const arima::ForecastPath& forecast);

// energy = country_sum / ratio(year) with K attached. Throws DomainError when
// a ratio is outside (0, 1] and ArgumentError when a year has no ratio.
GlobalForecast aggregate_global(const CountrySums& sums, const std::map<int, double>& ratio,
                                units::YearConvention convention);

// Table rows for the requested years; each year needs all four pathways.
std::vector<TableRow> emit_table(const GlobalForecast& forecast, std::span<const int> years);

// Constant per-year power growth g with (1 + g)^years = P(k_end) / P(k_start).
double calibrate_growth(double k_start, double k_end, int years);

std::vector<TrajectoryPoint> fusion_extrapolate(const FusionScenario& scenario);

// `header_comment` (without the leading '#') is written as a first line when
// non-empty.
void write_table_csv(std::ostream& out, std::span<const TableRow> rows,
                     const std::string& header_comment = "");
void write_trajectory_csv(std::ostream& out, std::span<const TrajectoryPoint> points,
                          const std::string& header_comment = "");

}  // namespace kardashev::pipeline
