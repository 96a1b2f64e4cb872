#pragma once

#include <cstddef>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace ecomplex::csv {

// Minimal RFC-4180-ish reader: comma separated, optional double-quoted
// fields with "" escapes, header row required. No embedded newlines.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::unordered_map<std::string, std::size_t> columns;

  // throws std::runtime_error when the column is absent
  std::size_t column(const std::string& name) const;
  bool has_column(const std::string& name) const;
};

std::vector<std::string> split_line(const std::string& line);
Table read_file(const std::string& path);

// Stable float formatting: 12 significant digits, NaN rendered as empty.
std::string fmt(double v);

class Writer {
 public:
  explicit Writer(const std::string& path);
  void header(const std::vector<std::string>& names);
  void field(const std::string& v);
  void field(double v);
  void field(long long v);
  void field(int v) { field(static_cast<long long>(v)); }
  void field(std::size_t v) { field(static_cast<long long>(v)); }
  void end_row();
  void close();

 private:
  std::ofstream out_;
  bool row_open_ = false;
  void sep();
};

}  // namespace ecomplex::csv
