#include "tmpfc/app/table.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "tmpfc/error.hpp"

namespace tmpfc::app {

std::optional<std::size_t> Table::find(std::string_view column) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == column) return i;
  return std::nullopt;
}

std::size_t Table::require(std::string_view column) const {
  if (auto i = find(column)) return *i;
  throw Error(ErrorCode::MissingColumn, "missing column '" + std::string(column) + "'");
}

Table parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string cell;
  bool quoted = false, cell_started = false;
  std::size_t line = 1;
  auto end_record = [&] {
    if (cell_started || !record.empty()) {
      record.push_back(std::move(cell));
      records.push_back(std::move(record));
    }
    record.clear();
    cell.clear();
    cell_started = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        cell += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        cell_started = true;
        break;
      case ',':
        record.push_back(std::move(cell));
        cell.clear();
        cell_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        cell += c;
        cell_started = true;
    }
  }
  if (quoted) throw Error(ErrorCode::ParseError, "unterminated quote near line " + std::to_string(line));
  end_record();

  Table t;
  if (records.empty()) return t;
  t.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != t.header.size())
      throw Error(ErrorCode::ParseError, "row " + std::to_string(r + 1) + " has " + std::to_string(records[r].size()) +
                                             " cells, header has " + std::to_string(t.header.size()));
    t.rows.push_back(std::move(records[r]));
  }
  return t;
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

namespace {

void append_cell(std::string& out, const std::string& c) {
  if (c.find_first_of(",\"\n\r") == std::string::npos) {
    out += c;
    return;
  }
  out += '"';
  for (char ch : c) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
}

void append_row(std::string& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ',';
    append_cell(out, row[i]);
  }
  out += '\n';
}

}  // namespace

std::string write_csv(const Table& table) {
  std::string out;
  append_row(out, table.header);
  for (const auto& r : table.rows) append_row(out, r);
  return out;
}

Table left_join(const Table& left, const Table& right, std::string_view key) {
  const std::size_t lk = left.require(key);
  const std::size_t rk = right.require(key);
  std::vector<std::size_t> extra;
  for (std::size_t i = 0; i < right.header.size(); ++i)
    if (i != rk && !left.find(right.header[i])) extra.push_back(i);

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t r = 0; r < right.rows.size(); ++r) {
    if (!index.emplace(right.rows[r][rk], r).second)
      throw Error(ErrorCode::DuplicateCase, "duplicate key '" + right.rows[r][rk] + "' in joined table");
  }

  Table out;
  out.header = left.header;
  for (auto i : extra) out.header.push_back(right.header[i]);
  for (const auto& row : left.rows) {
    auto joined = row;
    auto it = index.find(row[lk]);
    for (auto i : extra) joined.push_back(it == index.end() ? std::string() : right.rows[it->second][i]);
    out.rows.push_back(std::move(joined));
  }
  return out;
}

std::optional<double> parse_real(std::string_view cell) {
  while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
  while (!cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size())
    throw Error(ErrorCode::ParseError, "not a number: '" + std::string(cell) + "'");
  return v;
}

std::optional<bool> parse_bool(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell == "true" || cell == "1" || cell == "TRUE" || cell == "True") return true;
  if (cell == "false" || cell == "0" || cell == "FALSE" || cell == "False") return false;
  throw Error(ErrorCode::ParseError, "not a boolean: '" + std::string(cell) + "'");
}

}  // namespace tmpfc::app
