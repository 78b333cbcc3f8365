#include "nproxy/tests_core.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "nproxy/statdist.hpp"

namespace nproxy {

std::string_view to_string(DegenerateReason reason) noexcept {
  switch (reason) {
    case DegenerateReason::none: return "";
    case DegenerateReason::zero_weights: return "zero-weights";
    case DegenerateReason::nonpositive_information: return "nonpositive-information";
  }
  return "";
}

void check_level(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in (0, 1)");
}

void check_weights(std::span<const double> y, std::span<const double> gamma) {
  if (y.empty()) throw std::domain_error("empty outcome vector");
  if (gamma.size() != y.size()) throw std::domain_error("gamma and y lengths differ");
  for (double g : gamma) {
    if (!(g >= 0.0 && g <= 1.0)) throw std::domain_error("gamma values must lie in [0, 1]");
  }
}

TestResult make_result(std::string name, std::size_t n, double estimate, double std_error, double alpha) {
  TestResult r;
  r.test_name = std::move(name);
  r.n = n;
  r.estimate = estimate;
  r.std_error = std_error;
  r.statistic = estimate / std_error;
  r.alpha = alpha;
  r.threshold = upper_critical_value(alpha);
  r.reject = r.statistic > r.threshold;
  return r;
}

TestResult make_degenerate_result(std::string name, std::size_t n, double estimate, double alpha,
                                  DegenerateReason reason) {
  TestResult r;
  r.test_name = std::move(name);
  r.n = n;
  r.estimate = estimate;
  r.std_error = std::numeric_limits<double>::quiet_NaN();
  r.statistic = std::numeric_limits<double>::quiet_NaN();
  r.alpha = alpha;
  r.threshold = upper_critical_value(alpha);
  r.reject = false;
  r.degenerate = true;
  r.reason = reason;
  return r;
}

TestResult naive_test(std::span<const double> y, double alpha) {
  if (y.empty()) throw std::domain_error("naive_test: empty outcome vector");
  check_level(alpha);
  double sum = 0.0;
  for (double v : y) sum += v;
  const auto n = static_cast<double>(y.size());
  TestResult r = make_result("naive", y.size(), sum / n, 1.0 / std::sqrt(n), alpha);
  // Report sqrt(n) * mean directly so the statistic does not pick up the
  // rounding of 1/sqrt(n).
  r.statistic = std::sqrt(n) * r.estimate;
  r.reject = r.statistic > r.threshold;
  return r;
}

TestResult weighted_test(std::span<const double> y, std::span<const double> gamma, double alpha) {
  check_weights(y, gamma);
  check_level(alpha);
  double sum_g = 0.0;
  double sum_g2 = 0.0;
  double sum_gy = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sum_g += gamma[i];
    sum_g2 += gamma[i] * gamma[i];
    sum_gy += gamma[i] * y[i];
  }
  if (sum_g == 0.0) {
    return make_degenerate_result("wtd", y.size(), std::numeric_limits<double>::quiet_NaN(), alpha,
                                  DegenerateReason::zero_weights);
  }
  return make_result("wtd", y.size(), sum_gy / sum_g, std::sqrt(sum_g2) / sum_g, alpha);
}

}  // namespace nproxy
