#include "satqkd/csv.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace satqkd {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string{} : field.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path,
                                                  const std::vector<std::string>& columns) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::vector<double>> cols(columns.size());
  std::string line;
  int lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    const auto fields = split(line);
    if (!have_header) {
      if (fields != columns) {
        std::string want;
        for (const auto& c : columns) want += (want.empty() ? "" : ",") + c;
        throw std::runtime_error(fmt::format("{}:{}: expected header '{}'", path.string(), lineno, want));
      }
      have_header = true;
      continue;
    }
    if (fields.size() != columns.size())
      throw std::runtime_error(
          fmt::format("{}:{}: expected {} fields, got {}", path.string(), lineno, columns.size(), fields.size()));
    for (std::size_t i = 0; i < fields.size(); ++i) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(fields[i], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != fields[i].size() || fields[i].empty())
        throw std::runtime_error(fmt::format("{}:{}: '{}' is not a number", path.string(), lineno, fields[i]));
      cols[i].push_back(v);
    }
  }
  if (!have_header) throw std::runtime_error(path.string() + ": missing header row");
  return cols;
}

std::string format_number(double x) { return fmt::format("{}", x); }

void CsvWriter::comment(const std::string& text) { out_ << "# " << text << '\n'; }

void CsvWriter::header(const std::vector<std::string>& columns) { row(columns); }

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
}

}  // namespace satqkd
