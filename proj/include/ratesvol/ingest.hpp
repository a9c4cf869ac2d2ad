#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ratesvol {

/// Calendar month without day or time zone.
struct YearMonth {
  int year = 0;
  int month = 1;  // 1..12

  /// Months since year 0; consecutive months differ by exactly one.
  int ordinal() const noexcept { return year * 12 + (month - 1); }
  YearMonth next() const noexcept;
  std::string to_string() const;  // "YYYY-MM"

  /// Accepts "YYYY-MM" and "YYYY-MM-DD"; the day, if present, is validated and dropped.
  static std::optional<YearMonth> parse(std::string_view text);

  friend bool operator==(const YearMonth&, const YearMonth&) = default;
  friend auto operator<=>(const YearMonth& a, const YearMonth& b) { return a.ordinal() <=> b.ordinal(); }
};

/// Zero-coupon rates (percent per annum), one row per month, one column per maturity.
struct RatePanel {
  std::vector<YearMonth> dates;
  std::vector<double> maturities;  // years
  Eigen::MatrixXd values;          // dates.size() x maturities.size()

  Eigen::Index rows() const noexcept { return values.rows(); }
  Eigen::Index cols() const noexcept { return values.cols(); }
};

/// Monthly observed volatility V(t) in index points.
struct VolSeries {
  std::vector<YearMonth> dates;
  Eigen::VectorXd values;

  Eigen::VectorXd log_values() const { return values.array().log().matrix(); }
};

struct AlignedDataset {
  RatePanel panel;
  VolSeries vol;
};

struct LoadReport {
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
  std::optional<YearMonth> first;
  std::optional<YearMonth> last;
};

/// Which columns of a delimited file carry the date and each maturity.
/// An empty layout is resolved from the header (see resolve_layout).
struct PanelLayout {
  std::string date_column;
  std::vector<std::pair<std::string, double>> maturity_columns;  // (column name, years)
};

enum class VolFrequency { Daily, Monthly };

/// Resolves an empty layout from a header row. Maturity columns are recognised as
/// FRED series ids (THREEFY<k>, also the THREEF<k> variant), bare integers, or "<k>Y".
PanelLayout resolve_layout(const std::vector<std::string>& header, const PanelLayout& requested);

RatePanel read_rate_panel(std::istream& in, const PanelLayout& layout = {}, LoadReport* report = nullptr);
RatePanel load_rate_panel(const std::filesystem::path& path, const PanelLayout& layout = {},
                          LoadReport* report = nullptr);

VolSeries read_vol(std::istream& in, VolFrequency frequency, LoadReport* report = nullptr,
                   const std::string& value_column = {});
VolSeries load_vol(const std::filesystem::path& path, VolFrequency frequency, LoadReport* report = nullptr,
                   const std::string& value_column = {});

/// Writes the panel with a "date" column and one "<k>Y" column per maturity. Values use the
/// shortest decimal form that reads back to the identical double.
void write_rate_panel(std::ostream& out, const RatePanel& panel);
void write_vol(std::ostream& out, const VolSeries& vol);

/// Truncates both series to their common months. Requires at least 24 shared months.
AlignedDataset align(const RatePanel& panel, const VolSeries& vol);

void validate(const RatePanel& panel);
void validate(const VolSeries& vol);

}  // namespace ratesvol
