#include "swarmlab/csv.hpp"

#include "swarmlab/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace swarmlab {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (res.ec != std::errc()) throw NumericalError("format_double: conversion failed");
  return std::string(buf.data(), res.ptr);
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
}

void CsvWriter::sep() {
  if (current_ >= columns_) throw DomainError("CsvWriter: too many fields in row");
  if (current_ > 0) out_ << ',';
  ++current_;
}

CsvWriter& CsvWriter::field(double x) {
  sep();
  out_ << format_double(x);
  return *this;
}

CsvWriter& CsvWriter::field(long long x) {
  sep();
  out_ << x;
  return *this;
}

CsvWriter& CsvWriter::field(std::string_view s) {
  sep();
  out_ << s;
  return *this;
}

void CsvWriter::end_row() {
  if (current_ != columns_) throw DomainError("CsvWriter: row has too few fields");
  out_ << '\n';
  current_ = 0;
}

}  // namespace swarmlab
