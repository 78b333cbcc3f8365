#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include "nproxy/model.hpp"

namespace nproxy {

/// Malformed input file. Carries the 1-based line and the offending field.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::string field, const std::string& what);
  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  [[nodiscard]] const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

inline constexpr std::string_view kDatasetCsvHeader = "y,gamma,y_prime,z";

/// Shortest decimal text that parses back to exactly `x`.
std::string format_number(double x);
/// Strict decimal parse of the whole token; nullopt-like failure reported by throwing ParseError.
double parse_number(std::string_view token, std::size_t line, std::string_view field);

void write_dataset_csv(std::ostream& out, const Dataset& data);
Dataset read_dataset_csv(std::istream& in);

}  // namespace nproxy
