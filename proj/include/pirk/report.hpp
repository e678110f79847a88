#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pirk {

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

/// Minimal CSV writer: header first, LF line endings, numbers in
/// shortest round-trip form. Fields containing commas or quotes are
/// quoted per RFC 4180.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out, std::vector<std::string> header);
  void row(const std::vector<std::string>& fields);
  void row(const std::vector<double>& values);

 private:
  std::ostream& out_;
  size_t width_;
  void emit(const std::vector<std::string>& fields);
};

}  // namespace pirk
