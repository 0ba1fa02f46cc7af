#pragma once

#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace rfa {

/// Shortest-roundtrip decimal formatting (std::to_chars): locale-independent
/// and byte-stable, so identical runs produce identical files.
std::string format_double(double v);
std::string format_int(long long v);

/// Minimal CSV writer for the pipeline's tabular outputs. No quoting: fields
/// must not contain commas or newlines (site ids are validated at ingest).
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& fields);
  void close();

 private:
  std::ofstream out_;
  std::size_t n_cols_;
  std::string path_;
};

/// Minimal line-oriented CSV reader matching CsvWriter's dialect.
class CsvReader {
 public:
  explicit CsvReader(const std::string& path);

  const std::vector<std::string>& header() const { return header_; }
  int column(std::string_view name) const;  // -1 if absent
  int require_column(std::string_view name) const;

  /// Next data row split on commas; false at EOF. Throws DataError on a
  /// column-count mismatch, reporting the line number.
  bool next(std::vector<std::string>& fields);

  std::size_t line_number() const { return line_no_; }
  const std::string& path() const { return path_; }

 private:
  std::ifstream in_;
  std::vector<std::string> header_;
  std::string path_;
  std::string buf_;
  std::size_t line_no_ = 0;
};

double parse_double_field(const std::string& field, const CsvReader& reader,
                          std::string_view col_name);
long long parse_int_field(const std::string& field, const CsvReader& reader,
                          std::string_view col_name);

}  // namespace rfa
