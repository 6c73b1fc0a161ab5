#pragma once
#include <optional>
#include <string>
#include <vector>

namespace cenobreak {

/// A parsed delimited text file: header plus string cells, ragged rows kept.
struct CsvTable {
  char delimiter = ',';
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column position for a header name, if present.
  std::optional<std::size_t> column(const std::string& name) const;
};

/// Reads a delimited file. If `delimiter` is '\0' the separator is detected
/// from the header line (tab wins if present, else comma).
CsvTable read_delimited(const std::string& path, char delimiter = '\0');

/// Splits one line on the delimiter (no quoting; scientific CSV exports).
std::vector<std::string> split_line(const std::string& line, char delimiter);

/// Parses a decimal cell. Empty cells and the usual NA spellings return
/// nullopt with *missing = true; unparsable text returns nullopt with
/// *missing = false.
std::optional<double> parse_cell(const std::string& cell, bool* missing);

/// Writes `content` to `path` atomically: a unique sibling temp file is
/// written, flushed, then renamed over the target. Throws on I/O failure.
void atomic_write_file(const std::string& path, const std::string& content);

}  // namespace cenobreak
