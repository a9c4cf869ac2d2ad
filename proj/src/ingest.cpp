#include "ratesvol/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "ratesvol/error.hpp"
#include "ratesvol/format.hpp"

namespace ratesvol {
namespace {

constexpr double kRateFloor = -5.0;
constexpr double kRateCeiling = 50.0;
constexpr std::size_t kMinDailyObservations = 15;
constexpr std::size_t kMinOverlap = 24;

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool is_missing(std::string_view field) {
  field = trim(field);
  return field.empty() || field == "." || field == "NA" || field == "N/A";
}

std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> maturity_from_name(std::string_view name) {
  std::string u = upper(trim(name));
  std::string_view s = u;
  for (std::string_view prefix : {"THREEFY", "THREEF"}) {
    if (s.starts_with(prefix)) {
      auto k = parse_int(s.substr(prefix.size()));
      if (k && *k > 0) return static_cast<double>(*k);
      return std::nullopt;
    }
  }
  if (s.ends_with("Y")) s.remove_suffix(1);
  auto v = parse_double(s);
  if (v && *v > 0.0 && std::isfinite(*v)) return v;
  return std::nullopt;
}

bool looks_like_date_column(std::string_view name) {
  std::string u = upper(trim(name));
  return u == "DATE" || u == "OBSERVATION_DATE" || u == "MONTH";
}

struct DayStamp {
  YearMonth month;
  int day = 0;
};

std::optional<DayStamp> parse_day(std::string_view text) {
  text = trim(text);
  auto ym = YearMonth::parse(text);
  if (!ym) return std::nullopt;
  int day = 0;
  if (text.size() == 10) {
    auto d = parse_int(text.substr(8, 2));
    if (!d) return std::nullopt;
    day = *d;
  }
  return DayStamp{*ym, day};
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;  // (line number, fields)
};

CsvTable read_table(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (trim(view).empty()) continue;
    if (table.header.empty()) {
      table.header = split_csv_line(view);
      continue;
    }
    table.rows.emplace_back(line_no, split_csv_line(view));
  }
  if (table.header.empty()) throw Error(ErrorCode::ParseError, "input has no header row");
  return table;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (upper(header[i]) == upper(name)) return i;
  throw Error(ErrorCode::MissingColumn, "column '" + name + "' not found in header");
}

const std::string& field_at(const std::vector<std::string>& fields, std::size_t col, std::size_t line_no) {
  if (col >= fields.size())
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + " has too few fields");
  return fields[col];
}

void require_consecutive(const std::vector<YearMonth>& dates, std::string_view what) {
  for (std::size_t i = 1; i < dates.size(); ++i) {
    const int step = dates[i].ordinal() - dates[i - 1].ordinal();
    if (step <= 0)
      throw Error(ErrorCode::NonMonotoneDates, std::string(what) + ": date " + dates[i].to_string() +
                                                   " does not follow " + dates[i - 1].to_string());
    if (step > 1)
      throw Error(ErrorCode::NonMonotoneDates, std::string(what) + ": gap between " +
                                                   dates[i - 1].to_string() + " and " + dates[i].to_string());
  }
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + path.string());
  return in;
}

void fill_range(LoadReport* report, const std::vector<YearMonth>& dates) {
  if (!report || dates.empty()) return;
  report->first = dates.front();
  report->last = dates.back();
}

}  // namespace

YearMonth YearMonth::next() const noexcept {
  return month == 12 ? YearMonth{year + 1, 1} : YearMonth{year, month + 1};
}

std::string YearMonth::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
  return buf;
}

std::optional<YearMonth> YearMonth::parse(std::string_view text) {
  text = trim(text);
  if (text.size() != 7 && text.size() != 10) return std::nullopt;
  if (text[4] != '-') return std::nullopt;
  auto y = parse_int(text.substr(0, 4));
  auto m = parse_int(text.substr(5, 2));
  if (!y || !m || *m < 1 || *m > 12) return std::nullopt;
  if (text.size() == 10) {
    if (text[7] != '-') return std::nullopt;
    auto d = parse_int(text.substr(8, 2));
    static constexpr int kDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    const bool leap = (*y % 4 == 0 && *y % 100 != 0) || *y % 400 == 0;
    const int last = kDays[*m - 1] + (*m == 2 && leap ? 1 : 0);
    if (!d || *d < 1 || *d > last) return std::nullopt;
  }
  return YearMonth{*y, *m};
}

PanelLayout resolve_layout(const std::vector<std::string>& header, const PanelLayout& requested) {
  PanelLayout layout = requested;
  if (layout.date_column.empty()) {
    auto it = std::find_if(header.begin(), header.end(), [](const std::string& h) { return looks_like_date_column(h); });
    if (it == header.end() && header.empty()) throw Error(ErrorCode::MissingColumn, "empty header");
    layout.date_column = it != header.end() ? *it : header.front();
  }
  if (layout.maturity_columns.empty()) {
    for (const auto& name : header) {
      if (upper(name) == upper(layout.date_column)) continue;
      if (auto years = maturity_from_name(name)) layout.maturity_columns.emplace_back(name, *years);
    }
  }
  std::sort(layout.maturity_columns.begin(), layout.maturity_columns.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  for (std::size_t i = 1; i < layout.maturity_columns.size(); ++i)
    if (layout.maturity_columns[i].second == layout.maturity_columns[i - 1].second)
      throw Error(ErrorCode::MissingColumn, "duplicate maturity " + format_shortest(layout.maturity_columns[i].second));
  if (layout.maturity_columns.size() < 2)
    throw Error(ErrorCode::MissingColumn, "need at least 2 maturity columns, found " +
                                              std::to_string(layout.maturity_columns.size()));
  return layout;
}

RatePanel read_rate_panel(std::istream& in, const PanelLayout& requested, LoadReport* report) {
  const CsvTable table = read_table(in);
  const PanelLayout layout = resolve_layout(table.header, requested);
  const std::size_t date_col = column_index(table.header, layout.date_column);
  std::vector<std::size_t> cols;
  for (const auto& [name, years] : layout.maturity_columns) cols.push_back(column_index(table.header, name));

  RatePanel panel;
  for (const auto& [name, years] : layout.maturity_columns) panel.maturities.push_back(years);

  std::vector<double> flat;
  std::size_t dropped = 0;
  for (const auto& [line_no, fields] : table.rows) {
    const auto date = YearMonth::parse(field_at(fields, date_col, line_no));
    if (!date) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad date '" +
                                                      field_at(fields, date_col, line_no) + "'");
    std::vector<double> row;
    bool missing = false;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const std::string& text = field_at(fields, cols[j], line_no);
      if (is_missing(text)) {
        missing = true;
        break;
      }
      auto v = parse_double(text);
      if (!v || !std::isfinite(*v))
        throw Error(ErrorCode::NonFiniteValue, "line " + std::to_string(line_no) + ", column '" +
                                                   layout.maturity_columns[j].first + "': '" + text + "'");
      if (*v < kRateFloor || *v > kRateCeiling)
        throw Error(ErrorCode::ValueOutOfRange, "line " + std::to_string(line_no) + ", column '" +
                                                    layout.maturity_columns[j].first + "': " + text +
                                                    " outside [-5, 50] percent");
      row.push_back(*v);
    }
    if (missing) {
      ++dropped;
      continue;
    }
    panel.dates.push_back(*date);
    flat.insert(flat.end(), row.begin(), row.end());
  }
  require_consecutive(panel.dates, "rate panel");

  const auto T = static_cast<Eigen::Index>(panel.dates.size());
  const auto M = static_cast<Eigen::Index>(cols.size());
  panel.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), T, M);
  if (report) {
    report->rows_read = table.rows.size();
    report->rows_dropped = dropped;
    fill_range(report, panel.dates);
  }
  return panel;
}

RatePanel load_rate_panel(const std::filesystem::path& path, const PanelLayout& layout, LoadReport* report) {
  auto in = open_or_throw(path);
  return read_rate_panel(in, layout, report);
}

VolSeries read_vol(std::istream& in, VolFrequency frequency, LoadReport* report, const std::string& value_column) {
  const CsvTable table = read_table(in);
  std::size_t date_col = 0;
  {
    auto it = std::find_if(table.header.begin(), table.header.end(),
                           [](const std::string& h) { return looks_like_date_column(h); });
    if (it != table.header.end()) date_col = static_cast<std::size_t>(it - table.header.begin());
  }
  std::size_t value_col = 0;
  if (!value_column.empty()) {
    value_col = column_index(table.header, value_column);
  } else {
    auto vix = std::find_if(table.header.begin(), table.header.end(),
                            [](const std::string& h) { return upper(h) == "VIXCLS" || upper(h) == "VIX"; });
    if (vix != table.header.end()) {
      value_col = static_cast<std::size_t>(vix - table.header.begin());
    } else {
      if (table.header.size() < 2) throw Error(ErrorCode::MissingColumn, "volatility file needs a value column");
      value_col = date_col == 0 ? 1 : 0;
    }
  }

  struct Obs {
    DayStamp stamp;
    double value;
  };
  std::vector<Obs> obs;
  std::size_t dropped = 0;
  for (const auto& [line_no, fields] : table.rows) {
    const auto stamp = parse_day(field_at(fields, date_col, line_no));
    if (!stamp) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad date '" +
                                                       field_at(fields, date_col, line_no) + "'");
    const std::string& text = field_at(fields, value_col, line_no);
    if (is_missing(text)) {
      ++dropped;
      continue;
    }
    auto v = parse_double(text);
    if (!v || !std::isfinite(*v))
      throw Error(ErrorCode::NonFiniteValue, "line " + std::to_string(line_no) + ": '" + text + "'");
    if (*v <= 0.0)
      throw Error(ErrorCode::NonPositiveVol, "line " + std::to_string(line_no) + ": volatility " + text + " <= 0");
    if (!obs.empty()) {
      const auto& prev = obs.back().stamp;
      const bool increasing = frequency == VolFrequency::Daily
                                  ? std::pair(stamp->month.ordinal(), stamp->day) > std::pair(prev.month.ordinal(), prev.day)
                                  : stamp->month.ordinal() > prev.month.ordinal();
      if (!increasing)
        throw Error(ErrorCode::NonMonotoneDates, "line " + std::to_string(line_no) + ": date " +
                                                     field_at(fields, date_col, line_no) + " is not increasing");
    }
    obs.push_back({*stamp, *v});
  }

  VolSeries vol;
  std::vector<double> values;
  if (frequency == VolFrequency::Monthly) {
    for (const auto& o : obs) {
      vol.dates.push_back(o.stamp.month);
      values.push_back(o.value);
    }
  } else {
    std::size_t i = 0;
    while (i < obs.size()) {
      const YearMonth month = obs[i].stamp.month;
      // deviations from the first value keep a constant month exact
      const double base = obs[i].value;
      double sum = 0.0;
      std::size_t n = 0;
      for (; i < obs.size() && obs[i].stamp.month == month; ++i, ++n) sum += obs[i].value - base;
      if (n < kMinDailyObservations)
        throw Error(ErrorCode::SparseMonth, month.to_string() + " has " + std::to_string(n) +
                                                " daily observations (need " + std::to_string(kMinDailyObservations) + ")");
      vol.dates.push_back(month);
      values.push_back(base + sum / static_cast<double>(n));
    }
  }
  require_consecutive(vol.dates, "volatility series");
  vol.values = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  if (report) {
    report->rows_read = table.rows.size();
    report->rows_dropped = dropped;
    fill_range(report, vol.dates);
  }
  return vol;
}

VolSeries load_vol(const std::filesystem::path& path, VolFrequency frequency, LoadReport* report,
                   const std::string& value_column) {
  auto in = open_or_throw(path);
  return read_vol(in, frequency, report, value_column);
}

void write_rate_panel(std::ostream& out, const RatePanel& panel) {
  out << "date";
  for (double m : panel.maturities) out << ',' << format_shortest(m) << 'Y';
  out << '\n';
  for (Eigen::Index t = 0; t < panel.rows(); ++t) {
    out << panel.dates[static_cast<std::size_t>(t)].to_string();
    for (Eigen::Index j = 0; j < panel.cols(); ++j) out << ',' << format_shortest(panel.values(t, j));
    out << '\n';
  }
}

void write_vol(std::ostream& out, const VolSeries& vol) {
  out << "date,VIX\n";
  for (Eigen::Index t = 0; t < vol.values.size(); ++t)
    out << vol.dates[static_cast<std::size_t>(t)].to_string() << ',' << format_shortest(vol.values(t)) << '\n';
}

void validate(const RatePanel& panel) {
  if (panel.maturities.size() < 2) throw Error(ErrorCode::MissingColumn, "panel needs at least 2 maturities");
  if (static_cast<std::size_t>(panel.rows()) != panel.dates.size() ||
      static_cast<std::size_t>(panel.cols()) != panel.maturities.size())
    throw Error(ErrorCode::MisalignedSeries, "panel shape does not match its dates/maturities");
  require_consecutive(panel.dates, "rate panel");
  for (Eigen::Index t = 0; t < panel.rows(); ++t)
    for (Eigen::Index j = 0; j < panel.cols(); ++j) {
      const double v = panel.values(t, j);
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, "row " + std::to_string(t));
      if (v < kRateFloor || v > kRateCeiling) throw Error(ErrorCode::ValueOutOfRange, "row " + std::to_string(t));
    }
}

void validate(const VolSeries& vol) {
  if (static_cast<std::size_t>(vol.values.size()) != vol.dates.size())
    throw Error(ErrorCode::MisalignedSeries, "volatility values and dates differ in length");
  require_consecutive(vol.dates, "volatility series");
  for (Eigen::Index t = 0; t < vol.values.size(); ++t) {
    if (!std::isfinite(vol.values(t))) throw Error(ErrorCode::NonFiniteValue, "row " + std::to_string(t));
    if (vol.values(t) <= 0.0) throw Error(ErrorCode::NonPositiveVol, "row " + std::to_string(t));
  }
}

AlignedDataset align(const RatePanel& panel, const VolSeries& vol) {
  if (panel.dates.empty() || vol.dates.empty())
    throw Error(ErrorCode::InsufficientOverlap, "empty input series");
  const int first = std::max(panel.dates.front().ordinal(), vol.dates.front().ordinal());
  const int last = std::min(panel.dates.back().ordinal(), vol.dates.back().ordinal());
  const int overlap = last - first + 1;
  if (overlap < static_cast<int>(kMinOverlap))
    throw Error(ErrorCode::InsufficientOverlap,
                "series share " + std::to_string(std::max(overlap, 0)) + " months (need 24)");

  const auto p0 = static_cast<Eigen::Index>(first - panel.dates.front().ordinal());
  const auto v0 = static_cast<Eigen::Index>(first - vol.dates.front().ordinal());
  AlignedDataset out;
  out.panel.maturities = panel.maturities;
  out.panel.dates.assign(panel.dates.begin() + p0, panel.dates.begin() + p0 + overlap);
  out.panel.values = panel.values.middleRows(p0, overlap);
  out.vol.dates.assign(vol.dates.begin() + v0, vol.dates.begin() + v0 + overlap);
  out.vol.values = vol.values.segment(v0, overlap);
  return out;
}

}  // namespace ratesvol
