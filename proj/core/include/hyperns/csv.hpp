#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace hyperns {

/// Shortest text that reads back to the same double: 17 significant digits.
std::string format_double(double value);

/// Comma-separated table with a header row and LF line endings.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a named column; throws std::out_of_range when absent.
  std::size_t column(const std::string& name) const;
};

void write_csv(std::ostream& out, const CsvTable& table);
/// Throws IoError when the file cannot be written.
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Parses a numeric table. Throws IoError on unreadable files or
/// non-numeric cells and when a row's width differs from the header.
CsvTable read_csv(std::istream& in, const std::string& source_name = "<stream>");
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace hyperns
