#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cartan/errors.hpp"

namespace cartan {

// 17 significant digits: enough to round-trip any double, and deterministic.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct CsvDoc {
  std::vector<std::pair<std::string, std::string>> meta;  // '#'-prefixed key = value lines
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline void write_csv(std::ostream& os, const CsvDoc& doc) {
  for (const auto& [k, v] : doc.meta) os << "# " << k << " = " << v << "\n";
  for (std::size_t i = 0; i < doc.header.size(); ++i)
    os << (i ? "," : "") << doc.header[i];
  if (!doc.header.empty()) os << "\n";
  for (const auto& row : doc.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << fmt17(row[i]);
    os << "\n";
  }
}

inline void write_csv(const std::string& path, const CsvDoc& doc) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  write_csv(f, doc);
}

inline CsvDoc read_csv(std::istream& is) {
  CsvDoc doc;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto eq = line.find('=');
      if (eq != std::string::npos) {
        auto key = line.substr(1, eq - 1);
        auto val = line.substr(eq + 1);
        auto trim = [](std::string s) {
          auto b = s.find_first_not_of(" \t");
          auto e = s.find_last_not_of(" \t");
          return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        doc.meta.emplace_back(trim(key), trim(val));
      }
      continue;
    }
    std::vector<double> row;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      cells.push_back(cell);
      try {
        std::size_t pos = 0;
        double v = std::stod(cell, &pos);
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        if (pos != cell.size()) numeric = false;
        row.push_back(v);
      } catch (...) {
        numeric = false;
      }
    }
    if (!numeric && !header_seen) {
      doc.header = cells;
      header_seen = true;
      continue;
    }
    if (!numeric) throw IoError("malformed csv row: " + line);
    doc.rows.push_back(std::move(row));
  }
  return doc;
}

inline CsvDoc read_csv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open file: " + path);
  return read_csv(f);
}

}  // namespace cartan
