// csv.hpp - byte-stable CSV output.

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace csm {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

/// Comma-separated rows terminated by '\n'.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void header(const std::vector<std::string>& names);
  void row(const std::vector<double>& values);

 private:
  std::ostream& out_;
};

}  // namespace csm
