#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ratesvol {

/// Shortest decimal text that parses back to the same double.
std::string format_shortest(double value);

/// Fixed 17-significant-digit text, the form used in every JSON report.
std::string format_17(double value);

std::optional<double> parse_double(std::string_view text);

std::string_view trim(std::string_view text);

/// Splits one line of comma-separated text. Surrounding double quotes on a field are removed.
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace ratesvol
