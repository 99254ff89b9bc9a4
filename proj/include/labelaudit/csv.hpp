#pragma once
// RFC-4180 CSV and plain tab-separated reading/writing.

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "labelaudit/common.hpp"

namespace labelaudit::csv {

// Parses a whole CSV stream. Handles quoted fields, doubled quotes, embedded
// newlines inside quotes, and CRLF line endings. Fully blank lines are skipped.
inline std::vector<std::vector<std::string>> read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool row_has_content = false;  // any field committed or any char seen

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    row_has_content = true;
  };
  auto end_row = [&] {
    if (row_has_content || !field.empty()) {
      end_field();
      rows.push_back(std::move(row));
    }
    row.clear();
    field.clear();
    row_has_content = false;
  };

  char c;
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        row_has_content = true;  // a quoted field may be empty, e.g. `""`
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        break;
      default:
        field.push_back(c);
        break;
    }
  }
  if (in_quotes) throw Error("csv: unterminated quoted field");
  end_row();
  return rows;
}

// Tab-separated variant: no quoting, one record per line.
inline std::vector<std::vector<std::string>> read_tsv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> row;
    size_t start = 0;
    while (true) {
      size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        row.push_back(line.substr(start));
        break;
      }
      row.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::vector<std::vector<std::string>> read_table(const std::string& path, bool tab_separated) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  return tab_separated ? read_tsv(in) : read_csv(in);
}

inline std::string escape_csv(std::string_view field) {
  bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.put(',');
    out << escape_csv(fields[i]);
  }
  out.put('\n');
}

inline void write_tsv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.put('\t');
    if (fields[i].find_first_of("\t\r\n") != std::string::npos)
      throw Error("tsv: field contains tab or newline");
    out << fields[i];
  }
  out.put('\n');
}

}  // namespace labelaudit::csv
