#include "ecomplex/csv.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ecomplex::csv {

std::size_t Table::column(const std::string& name) const {
  auto it = columns.find(name);
  if (it == columns.end())
    throw std::runtime_error("csv: missing column '" + name + "'");
  return it->second;
}

bool Table::has_column(const std::string& name) const {
  return columns.find(name) != columns.end();
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

Table read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open '" + path + "'");
  Table table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first) {
      table.header = split_line(line);
      for (std::size_t i = 0; i < table.header.size(); ++i)
        table.columns.emplace(table.header[i], i);
      first = false;
      continue;
    }
    if (line.empty()) continue;
    table.rows.push_back(split_line(line));
  }
  if (first) throw std::runtime_error("csv: '" + path + "' has no header row");
  return table;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

Writer::Writer(const std::string& path) : out_(path) {
  if (!out_) throw std::runtime_error("csv: cannot write '" + path + "'");
}

void Writer::sep() {
  if (row_open_) out_ << ',';
  row_open_ = true;
}

void Writer::header(const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out_ << ',';
    out_ << names[i];
  }
  out_ << '\n';
}

void Writer::field(const std::string& v) {
  sep();
  if (v.find_first_of(",\"") != std::string::npos) {
    out_ << '"';
    for (char c : v) {
      if (c == '"') out_ << '"';
      out_ << c;
    }
    out_ << '"';
  } else {
    out_ << v;
  }
}

void Writer::field(double v) {
  sep();
  out_ << fmt(v);
}

void Writer::field(long long v) {
  sep();
  out_ << v;
}

void Writer::end_row() {
  out_ << '\n';
  row_open_ = false;
}

void Writer::close() { out_.close(); }

}  // namespace ecomplex::csv
