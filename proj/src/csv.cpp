#include "cenobreak/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

namespace cenobreak {

std::optional<std::size_t> CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

namespace {

std::string strip(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

CsvTable read_delimited(const std::string& path, char delimiter) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first) {
      if (delimiter == '\0') {
        delimiter = line.find('\t') != std::string::npos ? '\t' : ',';
      }
      table.delimiter = delimiter;
      table.header = split_line(line, delimiter);
      for (auto& h : table.header) h = strip(h);
      first = false;
      continue;
    }
    if (line.empty()) continue;
    table.rows.push_back(split_line(line, delimiter));
  }
  if (first) throw std::runtime_error("input file is empty: " + path);
  return table;
}

std::optional<double> parse_cell(const std::string& cell, bool* missing) {
  const std::string s = strip(cell);
  if (missing) *missing = false;
  if (s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == "N/A" || s == "null") {
    if (missing) *missing = true;
    return std::nullopt;
  }
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
  std::error_code ec;
  fs::create_directories(dir, ec);  // best effort; open error reported below

  std::random_device rd;
  std::uniform_int_distribution<unsigned> dist;
  fs::path tmp;
  std::ofstream out;
  for (int attempt = 0; attempt < 16 && !out.is_open(); ++attempt) {
    tmp = dir / (target.filename().string() + ".tmp" + std::to_string(dist(rd)));
    if (fs::exists(tmp)) continue;
    out.open(tmp, std::ios::binary | std::ios::trunc);
  }
  if (!out.is_open()) throw std::runtime_error("cannot create temp file near: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) {
    out.close();
    fs::remove(tmp, ec);
    throw std::runtime_error("write failed for: " + path);
  }
  out.close();
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("rename failed for: " + path);
  }
}

}  // namespace cenobreak
