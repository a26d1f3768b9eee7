#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace nlzcav {

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;
};

void write_csv(const CsvTable& table, std::ostream& out);
void write_csv(const CsvTable& table, const std::string& path);

/// Numeric CSV with a mandatory header row. Throws ConfigError on malformed input.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

}  // namespace nlzcav
