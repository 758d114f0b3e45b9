// Minimal CSV I/O: comma separated, '.' decimal, mandatory header row.
#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace satqkd {

/// Reads a numeric CSV whose header must match `columns` exactly. Lines
/// starting with '#' and blank lines are skipped. Returns one vector per
/// column. Throws std::runtime_error with file:line context.
std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path,
                                                  const std::vector<std::string>& columns);

/// Shortest round-trippable decimal form of x.
std::string format_number(double x);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void comment(const std::string& text);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

}  // namespace satqkd
