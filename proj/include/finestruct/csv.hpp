#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "finestruct/stats.hpp"

namespace finestruct {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// RFC 4180 records: comma separated, double-quoted fields may contain commas,
// quotes ("") and line breaks.
inline std::vector<std::vector<std::string>> parse_csv_records(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false, field_started = false, any = false;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // A blank line is kept as an empty record; the table decides what it means.
    if (record.size() == 1 && record[0].empty() && !any) record.clear();
    records.push_back(std::move(record));
    record.clear();
    any = false;
  };
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty()) throw CsvError("stray quote inside unquoted field");
        in_quotes = true;
        field_started = any = true;
        break;
      case ',':
        any = true;
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        break;
      default:
        field += c;
        field_started = any = true;
    }
  }
  if (in_quotes) throw CsvError("unterminated quoted field");
  if (any || !field.empty()) end_record();
  return records;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

// Numeric cell with '.' decimal. Empty, "NA", "NaN" and anything that is not a
// finite number become NaN (missing).
inline double parse_cell(std::string_view cell, bool* non_numeric = nullptr) {
  cell = trim(cell);
  constexpr double missing = std::numeric_limits<double>::quiet_NaN();
  if (cell.empty() || cell == "NA" || cell == "NaN") return missing;
  if (cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
    if (non_numeric) *non_numeric = true;
    return missing;
  }
  return std::isfinite(v) ? v : missing;
}

struct CsvTable {
  std::vector<FeatureSeries> features;
  std::vector<std::size_t> non_numeric;  // per column, cells that were not numbers
};

inline CsvTable parse_csv_table(std::string_view text) {
  auto records = parse_csv_records(text);
  while (!records.empty() && records.front().empty()) records.erase(records.begin());
  if (records.empty()) throw CsvError("empty CSV (no header row)");
  const auto& header = records.front();
  if (header.size() == 1 && trim(header[0]).empty()) throw CsvError("header row has no column names");

  const std::size_t cols = header.size();
  std::vector<std::vector<double>> raw(cols);
  CsvTable table;
  table.non_numeric.assign(cols, 0);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    // Blank lines are rows of one empty cell, which only means "missing" for a
    // single-column file.
    if (rec.empty() && cols > 1) continue;
    if (rec.size() > cols)
      throw CsvError("row " + std::to_string(r + 1) + " has " + std::to_string(rec.size()) + " fields, header has " +
                     std::to_string(cols));
    for (std::size_t c = 0; c < cols; ++c) {
      bool bad = false;
      raw[c].push_back(c < rec.size() ? parse_cell(rec[c], &bad) : std::numeric_limits<double>::quiet_NaN());
      if (bad) ++table.non_numeric[c];
    }
  }
  for (std::size_t c = 0; c < cols; ++c)
    table.features.push_back(FeatureSeries::from_raw(std::string(trim(header[c])), raw[c]));
  return table;
}

inline CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv_table(buf.str());
}

inline std::string format_csv_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string quote_csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string write_single_column_csv(const FeatureSeries& f) {
  std::string out = quote_csv_field(f.name) + "\n";
  for (double v : f.values) out += format_csv_number(v) + "\n";
  return out;
}

}  // namespace finestruct
