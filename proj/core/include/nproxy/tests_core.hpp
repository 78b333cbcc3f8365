#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace nproxy {

enum class DegenerateReason {
  none,
  zero_weights,             // sum of weights is 0
  nonpositive_information,  // Louis information <= 0
};

std::string_view to_string(DegenerateReason reason) noexcept;

/// Outcome of one one-sided test of H0: mu = 0 against H1: mu > 0.
/// When `degenerate` is set the statistic and standard error are NaN and
/// the test does not reject.
struct TestResult {
  std::string test_name;
  std::size_t n = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  double statistic = 0.0;
  double threshold = 0.0;
  double alpha = 0.0;
  bool reject = false;
  bool degenerate = false;
  DegenerateReason reason = DegenerateReason::none;
};

/// Builds a non-degenerate result: statistic = estimate / std_error.
TestResult make_result(std::string name, std::size_t n, double estimate, double std_error, double alpha);
/// Builds a flagged non-rejecting result.
TestResult make_degenerate_result(std::string name, std::size_t n, double estimate, double alpha,
                                  DegenerateReason reason);

/// One-sample z-test on the raw outcomes: reject when sqrt(n) * mean(y) > z_{1-alpha}.
TestResult naive_test(std::span<const double> y, double alpha);

/// z-test on the gamma-weighted mean with standard error sqrt(sum g^2) / sum g.
TestResult weighted_test(std::span<const double> y, std::span<const double> gamma, double alpha);

/// Shared precondition checks; throw std::domain_error.
void check_level(double alpha);
void check_weights(std::span<const double> y, std::span<const double> gamma);

}  // namespace nproxy
