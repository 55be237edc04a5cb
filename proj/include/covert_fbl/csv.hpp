#pragma once

#include <string>
#include <vector>

namespace covert_fbl {

struct Table {
  std::string provenance;  // written as a single '#' line
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Shortest round-trip representation; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

/// Locale-independent CSV with '\n' line endings.
std::string to_csv(const Table& table);

/// Writes bytes to path; throws std::runtime_error on I/O failure.
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace covert_fbl
