#include "nproxy/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace nproxy {

namespace {

PsiEstimate psi_from_sums(double sum_gy, double sum_y, double sum_g2, std::size_t n) {
  const auto count = static_cast<double>(n);
  PsiEstimate est;
  est.n = n;
  const double denominator = (sum_y / count) * std::sqrt(sum_g2 / count);
  if (!(denominator > kPsiDenominatorEpsilon)) {
    est.degenerate = true;
    est.psi_hat = std::numeric_limits<double>::quiet_NaN();
    return est;
  }
  est.psi_hat = (sum_gy / count) / denominator;
  return est;
}

// Type-1 empirical quantile (inverse of the empirical CDF); safe with infinities.
double order_statistic_quantile(std::vector<double>& values, double p) {
  const auto count = static_cast<double>(values.size());
  auto rank = static_cast<std::size_t>(std::ceil(p * count));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  auto nth = values.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

}  // namespace

PsiEstimate estimate_psi(std::span<const double> gamma, std::span<const double> y_prime) {
  if (gamma.empty()) throw std::domain_error("estimate_psi: empty input");
  if (gamma.size() != y_prime.size()) throw std::domain_error("estimate_psi: gamma and y_prime lengths differ");
  double sum_gy = 0.0;
  double sum_y = 0.0;
  double sum_g2 = 0.0;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    sum_gy += gamma[i] * y_prime[i];
    sum_y += y_prime[i];
    sum_g2 += gamma[i] * gamma[i];
  }
  return psi_from_sums(sum_gy, sum_y, sum_g2, gamma.size());
}

std::string_view to_string(BootstrapMethod method) noexcept {
  return method == BootstrapMethod::basic ? "basic" : "percentile";
}

BootstrapMethod parse_bootstrap_method(std::string_view text) {
  if (text == "basic") return BootstrapMethod::basic;
  if (text == "percentile") return BootstrapMethod::percentile;
  throw std::invalid_argument("unknown bootstrap method '" + std::string(text) + "' (expected basic or percentile)");
}

void BootstrapConfig::validate() const {
  if (n_resamples < 100) throw std::domain_error("bootstrap needs at least 100 resamples");
  if (!(alpha_prime > 0.0 && alpha_prime < 0.5)) throw std::domain_error("alpha_prime must lie in (0, 0.5)");
}

UpperBound bootstrap_upper_bound(std::span<const double> gamma, std::span<const double> y_prime,
                                 const BootstrapConfig& config) {
  config.validate();
  UpperBound bound;
  bound.estimate = estimate_psi(gamma, y_prime);
  if (bound.estimate.degenerate) {
    bound.value = std::numeric_limits<double>::infinity();
    return bound;
  }

  const std::size_t n = gamma.size();
  if (n > std::numeric_limits<std::uint32_t>::max()) throw std::domain_error("bootstrap: sample too large");
  const auto n32 = static_cast<std::uint32_t>(n);
  const bool basic = config.method == BootstrapMethod::basic;
  constexpr double inf = std::numeric_limits<double>::infinity();

  std::vector<double> replicates(config.n_resamples);
  for (std::size_t b = 0; b < config.n_resamples; ++b) {
    RngStream rng = config.rng.child(b);
    double sum_gy = 0.0;
    double sum_y = 0.0;
    double sum_g2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const std::uint32_t i = rng.below(n32);
      sum_gy += gamma[i] * y_prime[i];
      sum_y += y_prime[i];
      sum_g2 += gamma[i] * gamma[i];
    }
    const PsiEstimate star = psi_from_sums(sum_gy, sum_y, sum_g2, n);
    if (star.degenerate) {
      ++bound.degenerate_resamples;
      replicates[b] = basic ? -inf : inf;
    } else {
      replicates[b] = star.psi_hat;
    }
  }

  if (basic) {
    const double lower = order_statistic_quantile(replicates, config.alpha_prime);
    bound.value = 2.0 * bound.estimate.psi_hat - lower;
  } else {
    bound.value = order_statistic_quantile(replicates, 1.0 - config.alpha_prime);
  }
  return bound;
}

std::string_view to_string(Branch branch) noexcept { return branch == Branch::naive ? "naive" : "weighted"; }

AdaptiveResult adaptive_test(std::span<const double> y, std::span<const double> gamma,
                             std::span<const double> y_prime, double alpha, const BootstrapConfig& config,
                             InnerTest inner, const EmConfig& em_config) {
  if (y_prime.empty()) throw std::domain_error("adaptive_test: positive-control outcomes are required");
  check_weights(y, gamma);
  check_level(alpha);
  if (y_prime.size() != y.size()) throw std::domain_error("adaptive_test: y_prime length differs from y length");

  AdaptiveResult out;
  out.bound = bootstrap_upper_bound(gamma, y_prime, config);
  out.branch = select_branch(out.bound.value);
  if (out.branch == Branch::naive) {
    out.result = naive_test(y, alpha);
  } else {
    out.result = inner == InnerTest::wtd ? weighted_test(y, gamma, alpha) : wtd_plus_test(y, gamma, alpha, em_config);
  }
  out.result.test_name = inner == InnerTest::wtd ? "a_wtd" : "a_wtd+";
  return out;
}

AdaptiveResult adaptive_test(const Dataset& data, double alpha, const BootstrapConfig& config, InnerTest inner,
                             const EmConfig& em_config) {
  if (!data.y_prime) throw std::domain_error("adaptive_test: dataset has no positive-control column");
  return adaptive_test(data.y, data.gamma, *data.y_prime, alpha, config, inner, em_config);
}

}  // namespace nproxy
