#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tmpfc::app {

// Header-first CSV with RFC 4180 quoting. Cells stay strings; callers
// convert the columns they need.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> find(std::string_view column) const;
  /// Throws Error(MissingColumn) naming the column.
  std::size_t require(std::string_view column) const;
};

Table parse_csv(const std::string& text);
Table read_csv(const std::filesystem::path& path);
std::string write_csv(const Table& table);

/// Left join on a key column; right-hand columns already present on the
/// left are skipped. Unmatched left rows get empty cells.
Table left_join(const Table& left, const Table& right, std::string_view key);

std::optional<double> parse_real(std::string_view cell);
std::optional<bool> parse_bool(std::string_view cell);

}  // namespace tmpfc::app
