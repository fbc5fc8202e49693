#include "core/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <tuple>

#include "core/error.hpp"
#include "core/format.hpp"

namespace kardashev::ingest {

namespace {

constexpr int kMinYear = 1900;
constexpr int kMaxYear = 2100;

struct Line {
  long number = 0;
  std::vector<std::string> fields;
};

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// Reads the header and every non-blank line.
std::pair<Line, std::vector<Line>> read_lines(std::istream& in, const std::string& name) {
  std::pair<Line, std::vector<Line>> out;
  std::string text;
  long number = 0;
  bool have_header = false;
  while (std::getline(in, text)) {
    ++number;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (number == 1 && text.rfind("\xEF\xBB\xBF", 0) == 0) text.erase(0, 3);
    if (text.empty()) continue;
    if (!have_header) {
      out.first = {number, split_fields(text)};
      have_header = true;
    } else {
      out.second.push_back({number, split_fields(text)});
    }
  }
  if (!have_header) throw DataError(ErrorKind::kSchema, name, 0, "", "file is empty");
  return out;
}

// Checks that the header starts with `required` in order and returns the
// names of any trailing extra columns.
std::vector<std::string> check_header(const Line& header, const std::vector<std::string>& required,
                                      const std::string& name) {
  const auto& cols = header.fields;
  for (std::size_t i = 0; i < required.size(); ++i) {
    if (i < cols.size() && cols[i] == required[i]) continue;
    const bool present = std::find(cols.begin(), cols.end(), required[i]) != cols.end();
    throw DataError(ErrorKind::kSchema, name, header.number, required[i],
                    present ? "column out of order; expected header to start with the schema "
                              "columns in order"
                            : "missing required column");
  }
  std::vector<std::string> extra(cols.begin() + static_cast<long>(required.size()), cols.end());
  std::set<std::string> seen(cols.begin(), cols.begin() + static_cast<long>(required.size()));
  for (const auto& e : extra) {
    if (e.empty()) throw DataError(ErrorKind::kSchema, name, header.number, "", "empty column name");
    if (!seen.insert(e).second) {
      throw DataError(ErrorKind::kSchema, name, header.number, e, "duplicate column");
    }
  }
  return extra;
}

class RowReader {
 public:
  RowReader(const Line& line, const std::vector<std::string>& columns, const std::string& name)
      : line_(line), columns_(columns), name_(name) {
    if (line.fields.size() != columns.size()) {
      throw DataError(ErrorKind::kValidation, name, line.number, "",
                      "expected " + std::to_string(columns.size()) + " fields, found " +
                          std::to_string(line.fields.size()));
    }
  }

  const std::string& text(std::size_t i) const {
    if (line_.fields[i].empty()) fail(i, "empty value");
    return line_.fields[i];
  }

  double real(std::size_t i) const {
    const auto& s = text(i);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) fail(i, "not a number: '" + s + "'");
    if (!std::isfinite(v)) fail(i, "value is not finite");
    return v;
  }

  int year(std::size_t i) const {
    const auto& s = text(i);
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) fail(i, "not an integer year: '" + s + "'");
    if (v < kMinYear || v > kMaxYear) {
      fail(i, "year " + s + " outside [" + std::to_string(kMinYear) + ", " +
                  std::to_string(kMaxYear) + "]");
    }
    return v;
  }

  [[noreturn]] void fail(std::size_t i, const std::string& what) const {
    throw DataError(ErrorKind::kValidation, name_, line_.number, columns_[i], what);
  }
  [[noreturn]] void fail(const std::string& column, const std::string& what) const {
    throw DataError(ErrorKind::kValidation, name_, line_.number, column, what);
  }
  long number() const { return line_.number; }

 private:
  const Line& line_;
  const std::vector<std::string>& columns_;
  const std::string& name_;
};

std::vector<std::string> driver_columns() {
  return {kCoreFeatureNames.begin(), kCoreFeatureNames.end()};
}

FeatureVector read_drivers(const RowReader& row, std::size_t first,
                           const std::vector<std::string>& columns) {
  FeatureVector v;
  for (std::size_t i = first; i < columns.size(); ++i) {
    if (columns[i] == "energy_ej") continue;
    v.set(columns[i], row.real(i));
  }
  if (auto [column, reason] = v.check(); !column.empty()) row.fail(column, reason);
  return v;
}

template <class Open>
auto with_file(const std::string& path, Open&& open) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(ErrorKind::kIo, path, 0, "", "cannot open file");
  return open(in, path);
}

void write_drivers(std::ostream& out, const FeatureVector& v) {
  for (const auto& name : v.names()) out << ',' << format_double(v.get(name));
}

std::string extra_header(const FeatureVector& v) {
  std::string out;
  for (const auto& [name, value] : v.extra) out += "," + name;
  return out;
}

}  // namespace

std::string_view to_string(Ssp ssp) {
  switch (ssp) {
    case Ssp::k126: return "SSP126";
    case Ssp::k245: return "SSP245";
    case Ssp::k370: return "SSP370";
    case Ssp::k585: return "SSP585";
  }
  return "?";
}

std::optional<Ssp> parse_ssp(std::string_view text) {
  for (Ssp s : kAllSsps) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

RatioSeries::RatioSeries(ts::AnnualSeries series) : series_(std::move(series)) {
  for (std::size_t i = 0; i < series_.size(); ++i) {
    if (!(series_[i] > 0.0 && series_[i] <= 1.0)) {
      throw DomainError("ratio for year " + std::to_string(series_.start_year() + i) +
                        " outside (0, 1]");
    }
  }
}

std::string panel_header() {
  std::string h = "country,year";
  for (auto n : kCoreFeatureNames) h += "," + std::string(n);
  return h + ",energy_ej";
}

std::string scenario_header() {
  std::string h = "ssp,country,year";
  for (auto n : kCoreFeatureNames) h += "," + std::string(n);
  return h;
}

std::vector<PanelRecord> read_panel(std::istream& in, const std::string& name) {
  const auto [header, lines] = read_lines(in, name);
  std::vector<std::string> required = {"country", "year"};
  for (const auto& c : driver_columns()) required.push_back(c);
  required.push_back("energy_ej");
  const auto extra = check_header(header, required, name);
  std::vector<std::string> columns = required;
  columns.insert(columns.end(), extra.begin(), extra.end());
  const std::size_t energy_col = required.size() - 1;

  std::vector<PanelRecord> out;
  std::set<std::pair<std::string, int>> seen;
  for (const auto& line : lines) {
    RowReader row(line, columns, name);
    PanelRecord r;
    r.country = row.text(0);
    r.year = row.year(1);
    r.drivers = read_drivers(row, 2, columns);
    r.energy = row.real(energy_col);
    if (!(r.energy > 0.0)) row.fail(energy_col, "energy must be positive");
    if (!seen.emplace(r.country, r.year).second) {
      throw DataError(ErrorKind::kIntegrity, name, line.number, "country,year",
                      "duplicate record for " + r.country + " " + std::to_string(r.year));
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<DriverScenario> read_scenario(std::istream& in, const std::string& name) {
  const auto [header, lines] = read_lines(in, name);
  std::vector<std::string> required = {"ssp", "country", "year"};
  for (const auto& c : driver_columns()) required.push_back(c);
  const auto extra = check_header(header, required, name);
  std::vector<std::string> columns = required;
  columns.insert(columns.end(), extra.begin(), extra.end());

  std::vector<DriverScenario> out;
  std::set<std::tuple<Ssp, std::string, int>> seen;
  for (const auto& line : lines) {
    RowReader row(line, columns, name);
    DriverScenario s;
    const auto ssp = parse_ssp(row.text(0));
    if (!ssp) row.fail(0, "unknown pathway '" + row.text(0) + "'; expected SSP126, SSP245, SSP370 or SSP585");
    s.ssp = *ssp;
    s.country = row.text(1);
    s.year = row.year(2);
    s.drivers = read_drivers(row, 3, columns);
    if (!seen.emplace(s.ssp, s.country, s.year).second) {
      throw DataError(ErrorKind::kIntegrity, name, line.number, "ssp,country,year",
                      "duplicate row for " + std::string(to_string(s.ssp)) + " " + s.country +
                          " " + std::to_string(s.year));
    }
    out.push_back(std::move(s));
  }
  return out;
}

RatioSeries read_ratio(std::istream& in, const std::string& name) {
  const auto [header, lines] = read_lines(in, name);
  const std::vector<std::string> columns = {"year", "ratio"};
  check_header(header, columns, name);
  if (header.fields.size() != columns.size()) {
    throw DataError(ErrorKind::kSchema, name, header.number, header.fields[2], "unexpected column");
  }
  if (lines.empty()) throw DataError(ErrorKind::kValidation, name, 0, "", "no data rows");

  int start_year = 0;
  std::vector<double> values;
  for (const auto& line : lines) {
    RowReader row(line, columns, name);
    const int year = row.year(0);
    if (values.empty()) {
      start_year = year;
    } else if (year != start_year + static_cast<int>(values.size())) {
      row.fail(0, "expected year " + std::to_string(start_year + values.size()) + ", found " +
                      std::to_string(year) + " (years must be consecutive)");
    }
    const double v = row.real(1);
    if (!(v > 0.0 && v <= 1.0)) row.fail(1, "ratio must lie in (0, 1]");
    values.push_back(v);
  }
  return RatioSeries(ts::AnnualSeries(start_year, std::move(values)));
}

std::vector<PanelRecord> load_panel(const std::string& path) {
  return with_file(path, [](std::istream& in, const std::string& p) { return read_panel(in, p); });
}

std::vector<DriverScenario> load_scenario(const std::string& path) {
  return with_file(path, [](std::istream& in, const std::string& p) { return read_scenario(in, p); });
}

RatioSeries load_ratio(const std::string& path) {
  return with_file(path, [](std::istream& in, const std::string& p) { return read_ratio(in, p); });
}

void write_panel(std::ostream& out, std::span<const PanelRecord> records) {
  out << panel_header();
  if (!records.empty()) out << extra_header(records.front().drivers);
  out << '\n';
  for (const auto& r : records) {
    out << r.country << ',' << r.year;
    for (auto n : kCoreFeatureNames) out << ',' << format_double(r.drivers.get(n));
    out << ',' << format_double(r.energy);
    for (const auto& [name, value] : r.drivers.extra) out << ',' << format_double(value);
    out << '\n';
  }
}

void write_scenario(std::ostream& out, std::span<const DriverScenario> rows) {
  out << scenario_header();
  if (!rows.empty()) out << extra_header(rows.front().drivers);
  out << '\n';
  for (const auto& s : rows) {
    out << to_string(s.ssp) << ',' << s.country << ',' << s.year;
    write_drivers(out, s.drivers);
    out << '\n';
  }
}

void write_ratio(std::ostream& out, const RatioSeries& ratio) {
  out << "year,ratio\n";
  const auto& s = ratio.series();
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << s.start_year() + static_cast<int>(i) << ',' << format_double(s[i]) << '\n';
  }
}

DesignMatrix assemble_matrix(std::span<const PanelRecord> records) {
  if (records.empty()) throw ArgumentError("cannot assemble a design matrix from no records");
  DesignMatrix m;
  m.feature_names = records.front().drivers.names();
  std::vector<FeatureVector> drivers;
  drivers.reserve(records.size());
  for (const auto& r : records) {
    drivers.push_back(r.drivers);
    m.y.push_back(r.energy);
  }
  m.x = assemble_drivers(drivers, m.feature_names);
  return m;
}

forest::FeatureMatrix assemble_drivers(std::span<const FeatureVector> drivers,
                                       std::span<const std::string> feature_names) {
  forest::FeatureMatrix x(drivers.size(), feature_names.size());
  for (std::size_t r = 0; r < drivers.size(); ++r) {
    for (std::size_t c = 0; c < feature_names.size(); ++c) {
      x(r, c) = drivers[r].get(feature_names[c]);
    }
  }
  return x;
}

FeatureVector drivers_from_row(std::span<const double> row,
                               std::span<const std::string> feature_names) {
  if (row.size() != feature_names.size()) throw ArgumentError("row width does not match names");
  FeatureVector v;
  for (std::size_t i = 0; i < row.size(); ++i) v.set(feature_names[i], row[i]);
  return v;
}

}  // namespace kardashev::ingest
