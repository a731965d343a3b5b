#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace iongrad {

/// "%g"-style text with a fixed number of significant digits, so repeated runs
/// produce byte-identical files.
std::string num(double v, int significant = 12);

void write_csv_row(std::ostream& os, const std::vector<std::string>& cells);

/// Simple in-memory table that can be written as CSV.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  void write(std::ostream& os) const;
  void save(const std::filesystem::path& path) const;
};

/// Write a text file, throwing IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace iongrad
