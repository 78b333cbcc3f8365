#include "nproxy/dataset_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <vector>

namespace nproxy {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

}  // namespace

ParseError::ParseError(std::size_t line, std::string field, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + (field.empty() ? "" : ", field '" + field + "'") +
                         ": " + what),
      line_(line),
      field_(std::move(field)) {}

std::string format_number(double x) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), end);
}

double parse_number(std::string_view token, std::size_t line, std::string_view field) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (token.empty() || ec != std::errc{} || ptr != last) {
    throw ParseError(line, std::string(field), "expected a number, got '" + std::string(token) + "'");
  }
  return value;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  data.validate();
  out << kDatasetCsvHeader << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << format_number(data.y[i]) << ',' << format_number(data.gamma[i]) << ',';
    if (data.y_prime) out << format_number((*data.y_prime)[i]);
    out << ',';
    if (data.z) out << (*data.z)[i];
    out << '\n';
  }
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "", "empty input, expected header");
  if (strip_cr(line) != kDatasetCsvHeader) {
    throw ParseError(1, "", "header must be '" + std::string(kDatasetCsvHeader) + "'");
  }

  Dataset data;
  std::vector<double> y_prime;
  std::vector<int> z;
  std::optional<bool> has_y_prime;
  std::optional<bool> has_z;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = strip_cr(line);
    if (text.empty()) continue;
    const auto fields = split_fields(text);
    if (fields.size() != 4) {
      throw ParseError(line_no, "", "expected 4 fields, got " + std::to_string(fields.size()));
    }
    const double y = parse_number(fields[0], line_no, "y");
    if (!std::isfinite(y)) throw ParseError(line_no, "y", "value must be finite");
    const double g = parse_number(fields[1], line_no, "gamma");
    if (!(g >= 0.0 && g <= 1.0)) throw ParseError(line_no, "gamma", "value must lie in [0, 1]");
    data.y.push_back(y);
    data.gamma.push_back(g);

    const bool row_has_yp = !fields[2].empty();
    if (has_y_prime && *has_y_prime != row_has_yp) {
      throw ParseError(line_no, "y_prime", "column must be filled on every row or on none");
    }
    has_y_prime = row_has_yp;
    if (row_has_yp) {
      const double yp = parse_number(fields[2], line_no, "y_prime");
      if (!std::isfinite(yp)) throw ParseError(line_no, "y_prime", "value must be finite");
      y_prime.push_back(yp);
    }

    const bool row_has_z = !fields[3].empty();
    if (has_z && *has_z != row_has_z) {
      throw ParseError(line_no, "z", "column must be filled on every row or on none");
    }
    has_z = row_has_z;
    if (row_has_z) {
      if (fields[3] != "0" && fields[3] != "1") throw ParseError(line_no, "z", "value must be 0 or 1");
      z.push_back(fields[3] == "1" ? 1 : 0);
    }
  }
  if (data.y.empty()) throw ParseError(line_no, "", "dataset has no rows");
  if (has_y_prime.value_or(false)) data.y_prime = std::move(y_prime);
  if (has_z.value_or(false)) data.z = std::move(z);
  return data;
}

}  // namespace nproxy
