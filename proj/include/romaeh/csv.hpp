#ifndef ROMAEH_CSV_HPP
#define ROMAEH_CSV_HPP

#include <string>
#include <vector>

namespace romaeh {

// Numeric CSV with a single header row; %.16e values for bit-stable
// round trips.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  // -1 if absent
  std::vector<double> column_values(const std::string& name) const;
};

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

}  // namespace romaeh

#endif
