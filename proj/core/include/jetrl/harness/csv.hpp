#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace jetrl::harness {

/// 17 significant digits, "nan"/"inf" spelled out.
std::string format_double(double v);

/// Builds one CSV line; fields never need quoting in this toolkit's schemas.
class CsvRow {
 public:
  CsvRow& add(double v);
  CsvRow& add(std::int64_t v);
  CsvRow& add(std::uint64_t v);
  CsvRow& add(int v) { return add(static_cast<std::int64_t>(v)); }
  CsvRow& add(bool v) { return add(static_cast<std::int64_t>(v ? 1 : 0)); }
  CsvRow& add(std::string_view v);
  CsvRow& add(const char* v) { return add(std::string_view(v)); }
  CsvRow& add(const std::string& v) { return add(std::string_view(v)); }
  /// Empty field (value not available).
  CsvRow& blank();

  const std::string& str() const { return line_; }

 private:
  void sep();
  std::string line_;
  bool first_ = true;
};

/// Writes the header on construction; throws FormatError if the file cannot
/// be opened or written. Lines end with '\n'.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  void write(const CsvRow& row);
  void flush();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
};

/// create_directories that reports failure as FormatError.
void ensure_directory(const std::filesystem::path& dir);

}  // namespace jetrl::harness
