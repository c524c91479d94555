#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace swarmlab {

/// Shortest decimal string that parses back to the same double ('.' separator,
/// no locale). Non-finite values print as nan, inf, -inf.
std::string format_double(double x);

/// Minimal CSV emitter: LF line endings, no quoting (fields never contain commas).
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);

  CsvWriter& field(double x);
  CsvWriter& field(long long x);
  CsvWriter& field(int x) { return field(static_cast<long long>(x)); }
  CsvWriter& field(std::string_view s);
  void end_row();

 private:
  void sep();

  std::ostream& out_;
  size_t columns_;
  size_t current_ = 0;
};

}  // namespace swarmlab
