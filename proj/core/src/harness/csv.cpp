#include "jetrl/harness/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "jetrl/errors.hpp"

namespace jetrl::harness {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvRow::sep() {
  if (!first_) line_ += ',';
  first_ = false;
}

CsvRow& CsvRow::add(double v) {
  sep();
  line_ += format_double(v);
  return *this;
}

CsvRow& CsvRow::add(std::int64_t v) {
  sep();
  line_ += std::to_string(v);
  return *this;
}

CsvRow& CsvRow::add(std::uint64_t v) {
  sep();
  line_ += std::to_string(v);
  return *this;
}

CsvRow& CsvRow::add(std::string_view v) {
  sep();
  line_ += v;
  return *this;
}

CsvRow& CsvRow::blank() {
  sep();
  return *this;
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw FormatError("cannot create " + dir.string() + ": " + ec.message());
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::vector<std::string>& header)
    : path_(path), columns_(header.size()) {
  if (path.has_parent_path()) ensure_directory(path.parent_path());
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw FormatError("cannot open " + path.string() + " for writing");
  CsvRow h;
  for (const auto& name : header) h.add(name);
  write(h);
}

void CsvWriter::write(const CsvRow& row) {
  const auto fields =
      static_cast<std::size_t>(std::count(row.str().begin(), row.str().end(), ',')) + 1;
  if (fields != columns_)
    throw FormatError(path_.string() + ": row has " + std::to_string(fields) +
                      " fields, header has " + std::to_string(columns_));
  out_ << row.str() << '\n';
  if (!out_) throw FormatError("write to " + path_.string() + " failed");
}

void CsvWriter::flush() { out_.flush(); }

}  // namespace jetrl::harness
