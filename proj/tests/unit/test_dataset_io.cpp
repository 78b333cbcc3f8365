#include <gtest/gtest.h>

#include <sstream>

#include "nproxy/dataset_io.hpp"

using namespace nproxy;

TEST(DatasetCsv, RoundTripIsLossless) {
  ModelParams p;
  p.mu = 3.0;
  p.phi = 0.3;
  p.mu_prime = 2.0;
  p.proxy = ProxySpec::from_label("hvar");
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RngStream rng(seed);
    const Dataset original = generate_dataset(p, 50, rng);
    std::stringstream buffer;
    write_dataset_csv(buffer, original);
    const Dataset parsed = read_dataset_csv(buffer);
    ASSERT_EQ(parsed.y, original.y);
    ASSERT_EQ(parsed.gamma, original.gamma);
    ASSERT_EQ(parsed.y_prime, original.y_prime);
    ASSERT_EQ(parsed.z, original.z);
  }
}

TEST(DatasetCsv, OptionalColumnsLeftEmpty) {
  Dataset d;
  d.y = {1.5, -0.25};
  d.gamma = {0.5, 1.0};
  std::stringstream buffer;
  write_dataset_csv(buffer, d);
  EXPECT_EQ(buffer.str(), "y,gamma,y_prime,z\n1.5,0.5,,\n-0.25,1,,\n");
  const Dataset parsed = read_dataset_csv(buffer);
  EXPECT_FALSE(parsed.y_prime);
  EXPECT_FALSE(parsed.z);
}

TEST(DatasetCsv, FormatKeepsFullPrecision) {
  const double x = 0.1234567890123456789;
  EXPECT_EQ(parse_number(format_number(x), 1, "x"), x);
  EXPECT_EQ(format_number(1e-300), "1e-300");
}

TEST(DatasetCsv, ErrorsNameLineAndField) {
  auto parse = [](const std::string& text) {
    std::stringstream in(text);
    return read_dataset_csv(in);
  };
  try {
    parse("y,gamma,y_prime,z\n1,0.5,,\n2,abc,,\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.field(), "gamma");
  }
  try {
    parse("y,gamma,y_prime,z\n1,1.5,,\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.field(), "gamma");
  }
  try {
    parse("y,gamma,y_prime,z\n1,0.5,2,\n1,0.5,,\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.field(), "y_prime");
  }
  EXPECT_THROW(parse("y,gamma\n1,0.5\n"), ParseError);
  EXPECT_THROW(parse("y,gamma,y_prime,z\n"), ParseError);
  EXPECT_THROW(parse("y,gamma,y_prime,z\n1,0.5,,2\n"), ParseError);
  EXPECT_THROW(parse("y,gamma,y_prime,z\n1,0.5,\n"), ParseError);
}

TEST(DatasetCsv, AcceptsCrlf) {
  std::stringstream in("y,gamma,y_prime,z\r\n1,0.5,2,1\r\n");
  const Dataset d = read_dataset_csv(in);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ((*d.z)[0], 1);
}
