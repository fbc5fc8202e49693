#include "core/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <tuple>

#include "core/error.hpp"
#include "core/format.hpp"

namespace kardashev::pipeline {

namespace {

constexpr std::size_t kMaxListedGaps = 20;

}  // namespace

const GlobalEntry& GlobalForecast::at(int year, Ssp ssp) const {
  const auto it = entries.find({year, ssp});
  if (it == entries.end()) {
    throw ArgumentError("no global forecast for " + std::string(ingest::to_string(ssp)) + " " +
                        std::to_string(year));
  }
  return it->second;
}

void FusionScenario::validate() const {
  if (!std::isfinite(k_pivot)) throw ArgumentError("pivot K must be finite");
  if (!(growth_baseline >= 0.0) || !(growth_with_fusion > growth_baseline)) {
    throw ArgumentError("growth rates must satisfy with_fusion > baseline >= 0");
  }
  if (horizon_year <= pivot_year) throw ArgumentError("horizon year must follow the pivot year");
}

FusionScenario default_fusion_scenario() {
  FusionScenario s;
  const int years = s.horizon_year - s.pivot_year;
  s.k_pivot = kReferencePivotK;
  s.growth_with_fusion = calibrate_growth(kReferencePivotK, kReferenceFusionK2100, years);
  s.growth_baseline = calibrate_growth(kReferencePivotK, kReferenceBaselineK2100, years);
  return s;
}

CountrySums predict_countries(const forest::ForestModel& model,
                              std::span<const ingest::DriverScenario> scenario) {
  if (scenario.empty()) throw ArgumentError("scenario has no rows");

  std::vector<const ingest::DriverScenario*> rows;
  rows.reserve(scenario.size());
  std::set<Ssp> ssps;
  std::set<std::string> countries;
  std::set<int> years;
  for (const auto& r : scenario) {
    rows.push_back(&r);
    ssps.insert(r.ssp);
    countries.insert(r.country);
    years.insert(r.year);
  }
  std::sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) {
    return std::tie(a->ssp, a->year, a->country) < std::tie(b->ssp, b->year, b->country);
  });

  // Every (pathway, country, year) must be present exactly once.
  if (rows.size() != ssps.size() * countries.size() * years.size()) {
    std::set<std::tuple<Ssp, std::string, int>> present;
    for (const auto* r : rows) present.emplace(r->ssp, r->country, r->year);
    std::vector<std::string> gaps;
    std::size_t n_gaps = 0;
    for (Ssp s : ssps) {
      for (const auto& c : countries) {
        for (int y : years) {
          if (present.count({s, c, y})) continue;
          if (++n_gaps <= kMaxListedGaps) {
            gaps.push_back(std::string(ingest::to_string(s)) + "/" + c + "/" + std::to_string(y));
          }
        }
      }
    }
    std::string msg = "scenario is missing " + std::to_string(n_gaps) + " pathway/country/year rows:";
    for (const auto& g : gaps) msg += " " + g;
    if (n_gaps > gaps.size()) msg += " ...";
    throw CompletenessError(msg);
  }

  CountrySums sums;
  for (const auto* r : rows) sums[{r->ssp, r->year}] += forest::predict(model, r->drivers);
  return sums;
}

std::map<int, double> ratio_by_year(const ingest::RatioSeries& history,
                                    const arima::ForecastPath& forecast) {
  std::map<int, double> out;
  const auto& s = history.series();
  for (std::size_t i = 0; i < s.size(); ++i) out[s.start_year() + static_cast<int>(i)] = s[i];
  for (int h = 0; h < forecast.horizon; ++h) {
    out.try_emplace(forecast.year(h), forecast.point[static_cast<std::size_t>(h)]);
  }
  return out;
}

GlobalForecast aggregate_global(const CountrySums& sums, const std::map<int, double>& ratio,
                                units::YearConvention convention) {
  GlobalForecast out;
  out.convention = convention;
  for (const auto& [key, country_sum] : sums) {
    const auto [ssp, year] = key;
    const auto it = ratio.find(year);
    if (it == ratio.end()) {
      throw ArgumentError("no ratio available for year " + std::to_string(year));
    }
    const double r = it->second;
    if (!(r > 0.0 && r <= 1.0)) {
      throw DomainError("ratio " + format_double(r) + " for year " + std::to_string(year) +
                        " outside (0, 1]");
    }
    GlobalEntry e;
    e.country_sum = country_sum;
    e.ratio_used = r;
    e.energy = country_sum / r;
    e.k = units::k_from_annual_energy(units::AnnualEnergy(e.energy, convention)).value();
    out.entries[{year, ssp}] = e;
  }
  return out;
}

std::vector<TableRow> emit_table(const GlobalForecast& forecast, std::span<const int> years) {
  std::vector<TableRow> rows;
  for (int year : years) {
    TableRow row;
    row.year = year;
    for (std::size_t i = 0; i < ingest::kAllSsps.size(); ++i) {
      const auto it = forecast.entries.find({year, ingest::kAllSsps[i]});
      if (it == forecast.entries.end()) {
        throw ArgumentError("year " + std::to_string(year) + " is not covered for " +
                            std::string(ingest::to_string(ingest::kAllSsps[i])));
      }
      row.energy[i] = it->second.energy;
    }
    row.k = units::k_from_annual_energy(units::AnnualEnergy(row.energy[0], forecast.convention))
                .value();
    rows.push_back(row);
  }
  return rows;
}

double calibrate_growth(double k_start, double k_end, int years) {
  if (!std::isfinite(k_start) || !std::isfinite(k_end)) throw DomainError("K must be finite");
  if (years < 1) throw ArgumentError("growth calibration needs at least one year");
  // P(k_end) / P(k_start) = 10^(10 (k_end - k_start)).
  return std::pow(10.0, 10.0 * (k_end - k_start) / years) - 1.0;
}

std::vector<TrajectoryPoint> fusion_extrapolate(const FusionScenario& scenario) {
  scenario.validate();
  const double p0 = units::power_from_k(units::KardashevIndex(scenario.k_pivot)).value();
  std::vector<TrajectoryPoint> out;
  for (int year = scenario.pivot_year; year <= scenario.horizon_year; ++year) {
    const int n = year - scenario.pivot_year;
    auto k_at = [&](double g) {
      if (n == 0) return scenario.k_pivot;
      return units::k_from_power(units::PowerWatts(p0 * std::pow(1.0 + g, n))).value();
    };
    out.push_back({year, k_at(scenario.growth_with_fusion), k_at(scenario.growth_baseline)});
  }
  return out;
}

void write_table_csv(std::ostream& out, std::span<const TableRow> rows,
                     const std::string& header_comment) {
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  out << "year,ssp126_ej,ssp245_ej,ssp370_ej,ssp585_ej,k\n";
  for (const auto& r : rows) {
    out << r.year;
    for (double e : r.energy) out << ',' << format_fixed(e, 2);
    out << ',' << format_fixed(r.k, 5) << '\n';
  }
}

void write_trajectory_csv(std::ostream& out, std::span<const TrajectoryPoint> points,
                          const std::string& header_comment) {
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  out << "year,k_with_fusion,k_baseline\n";
  for (const auto& p : points) {
    out << p.year << ',' << format_fixed(p.k_with_fusion, 6) << ','
        << format_fixed(p.k_baseline, 6) << '\n';
  }
}

}  // namespace kardashev::pipeline
