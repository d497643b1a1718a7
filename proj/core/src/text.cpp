#include "admd/text.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "admd/error.hpp"

namespace admd {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::optional<double> parse_number(std::string_view text) {
  text = trim(text);
  if (text == "nan") return std::nan("");
  if (text == "inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return value;
}

std::string_view trim(std::string_view text) {
  constexpr std::string_view ws = " \t\r\n";
  const auto first = text.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(ws);
  return text.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view text, char delimiter) {
  std::vector<std::string> parts;
  std::size_t begin = 0;
  while (true) {
    const auto pos = text.find(delimiter, begin);
    if (pos == std::string_view::npos) {
      parts.emplace_back(trim(text.substr(begin)));
      break;
    }
    parts.emplace_back(trim(text.substr(begin, pos - begin)));
    begin = pos + 1;
  }
  return parts;
}

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) {
    fail(ErrorKind::InvalidInput, "table row has " + std::to_string(row.size()) +
                                      " cells, expected " + std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  fail(ErrorKind::InvalidInput, "table has no column '" + std::string(name) + "'");
}

double Table::number(std::size_t row, std::string_view name) const {
  const auto& cell = rows.at(row).at(column(name));
  auto value = parse_number(cell);
  if (!value) fail(ErrorKind::ParseError, "cell '" + cell + "' in column '" + std::string(name) + "' is not a number");
  return *value;
}

void write_table(std::ostream& out, const Table& table) {
  auto write_row = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  write_row(table.columns);
  for (const auto& row : table.rows) write_row(row);
}

Table read_table(std::istream& in) {
  Table table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split(line, ',');
    if (table.columns.empty()) {
      table.columns = std::move(cells);
      continue;
    }
    if (cells.size() != table.columns.size()) {
      fail(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                      std::to_string(table.columns.size()) + " cells, found " +
                                      std::to_string(cells.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

void save_table(const std::string& path, const Table& table) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::InvalidInput, "cannot write " + path);
  write_table(out, table);
}

Table load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidInput, "cannot open " + path);
  return read_table(in);
}

}  // namespace admd
