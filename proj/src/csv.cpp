#include "iongrad/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "iongrad/errors.hpp"

namespace iongrad {

std::string num(double v, int significant) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant, v);
  return buf;
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    const auto& c = cells[i];
    if (c.find_first_of(",\"\n") != std::string::npos) {
      os << '"';
      for (char ch : c) {
        if (ch == '"') os << '"';
        os << ch;
      }
      os << '"';
    } else {
      os << c;
    }
  }
  os << '\n';
}

void CsvTable::write(std::ostream& os) const {
  if (!header.empty()) write_csv_row(os, header);
  for (const auto& r : rows) write_csv_row(os, r);
}

void CsvTable::save(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write(os);
  if (!os) throw IoError("write failed: " + path.string());
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << content;
  if (!os) throw IoError("write failed: " + path.string());
}

}  // namespace iongrad
