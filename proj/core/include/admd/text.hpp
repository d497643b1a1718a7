#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace admd {

/// Shortest decimal form that parses back to the same double. Non-finite
/// values are written as nan, inf, -inf.
std::string format_number(double value);
std::optional<double> parse_number(std::string_view text);

std::string_view trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char delimiter);

/// Flat text table: a header row plus string cells, comma separated. Every
/// table the library writes goes through this type, so writers and readers
/// share one format.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::string_view name) const;

  friend bool operator==(const Table&, const Table&) = default;
};

void write_table(std::ostream& out, const Table& table);
Table read_table(std::istream& in);
void save_table(const std::string& path, const Table& table);
Table load_table(const std::string& path);

}  // namespace admd
