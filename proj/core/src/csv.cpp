#include "rfa/csv.hpp"

#include <charconv>
#include <cstdio>

#include "rfa/errors.hpp"

namespace rfa {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_int(long long v) {
  char buf[24];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary), n_cols_(header.size()), path_(path) {
  if (!out_) throw DataError("cannot open for writing: " + path);
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != n_cols_)
    throw UsageError("csv row width mismatch writing " + path_);
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw DataError("write failure on " + path_);
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') out.back().pop_back();
  return out;
}

}  // namespace

CsvReader::CsvReader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
  if (!in_) throw DataError("cannot open: " + path);
  if (!std::getline(in_, buf_)) throw DataError("empty file: " + path);
  line_no_ = 1;
  header_ = split_csv(buf_);
}

int CsvReader::column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i)
    if (header_[i] == name) return static_cast<int>(i);
  return -1;
}

int CsvReader::require_column(std::string_view name) const {
  const int idx = column(name);
  if (idx < 0)
    throw DataError(path_ + ": missing required column '" + std::string(name) + "'");
  return idx;
}

bool CsvReader::next(std::vector<std::string>& fields) {
  while (std::getline(in_, buf_)) {
    ++line_no_;
    if (buf_.empty()) continue;
    fields = split_csv(buf_);
    if (fields.size() != header_.size()) {
      throw DataError(path_ + ":" + std::to_string(line_no_) + ": expected " +
                      std::to_string(header_.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    return true;
  }
  return false;
}

double parse_double_field(const std::string& field, const CsvReader& reader,
                          std::string_view col_name) {
  double v = 0.0;
  const char* b = field.data();
  const char* e = b + field.size();
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e) {
    throw DataError(reader.path() + ":" + std::to_string(reader.line_number()) +
                    ": bad numeric value '" + field + "' in column " + std::string(col_name));
  }
  return v;
}

long long parse_int_field(const std::string& field, const CsvReader& reader,
                          std::string_view col_name) {
  long long v = 0;
  const char* b = field.data();
  const char* e = b + field.size();
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e) {
    throw DataError(reader.path() + ":" + std::to_string(reader.line_number()) +
                    ": bad integer value '" + field + "' in column " + std::string(col_name));
  }
  return v;
}

}  // namespace rfa
