#pragma once

// Deterministic CSV output: fixed six-decimal formatting, locale-free, LF
// line endings, empty cells for missing values. Byte-identical output for
// identical inputs is a contract (tests diff the files).

#include <cstdio>
#include <cstring>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace steerkd {

inline std::string format_fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  if (std::strcmp(buf, "-0.000000") == 0) return "0.000000";
  return std::string(buf);
}

inline std::string format_cell(const std::optional<double>& v) {
  return v ? format_fixed(*v) : std::string();
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline void write_csv(const CsvTable& table, std::ostream& os) {
  for (size_t i = 0; i < table.header.size(); ++i) {
    if (i) os << ',';
    os << table.header[i];
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      os << row[i];
    }
    os << '\n';
  }
}

}  // namespace steerkd
