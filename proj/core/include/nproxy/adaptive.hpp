#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "nproxy/model.hpp"
#include "nproxy/rng.hpp"
#include "nproxy/tests_core.hpp"
#include "nproxy/working_mle.hpp"

namespace nproxy {

/// Denominators at or below this are treated as degenerate.
inline constexpr double kPsiDenominatorEpsilon = 1e-12;

/// Plug-in estimate of psi = E[gamma | Z=1] / sqrt(E[gamma^2]) from a
/// positive-control outcome:
///   psi_hat = mean(gamma * y') / (mean(y') * sqrt(mean(gamma^2))).
struct PsiEstimate {
  double psi_hat = 0.0;
  std::size_t n = 0;
  bool degenerate = false;  // reason: nonpositive-control-mean
};

PsiEstimate estimate_psi(std::span<const double> gamma, std::span<const double> y_prime);

enum class BootstrapMethod { basic, percentile };
std::string_view to_string(BootstrapMethod method) noexcept;
BootstrapMethod parse_bootstrap_method(std::string_view text);

struct BootstrapConfig {
  std::size_t n_resamples = 2000;
  double alpha_prime = 0.05;
  BootstrapMethod method = BootstrapMethod::basic;
  RngStream rng{};

  void validate() const;
};

struct UpperBound {
  double value = 0.0;  // +inf when the original estimate is degenerate
  PsiEstimate estimate;
  std::size_t degenerate_resamples = 0;
};

/// 1 - alpha' upper confidence bound for psi from the nonparametric bootstrap
/// over (gamma_i, y'_i) pairs. Resample b draws from config.rng.child(b), so
/// the bound does not depend on evaluation order.
///
/// Degenerate resamples count as evidence for the weighted branch: they sit
/// at -inf before the lower quantile in the basic method and at +inf before
/// the upper quantile in the percentile method, both of which raise the bound.
UpperBound bootstrap_upper_bound(std::span<const double> gamma, std::span<const double> y_prime,
                                 const BootstrapConfig& config);

enum class Branch { naive, weighted };
std::string_view to_string(Branch branch) noexcept;
inline Branch select_branch(double upper_bound) noexcept {
  return upper_bound < 1.0 ? Branch::naive : Branch::weighted;
}

enum class InnerTest { wtd, wtd_plus };

struct AdaptiveResult {
  TestResult result;
  Branch branch = Branch::weighted;
  UpperBound bound;
};

/// Chooses the naive test when the upper bound for psi is below 1 and the
/// inner weighted test otherwise. The bound is computed from (gamma, y')
/// alone. Throws std::domain_error when y_prime is empty.
AdaptiveResult adaptive_test(std::span<const double> y, std::span<const double> gamma,
                             std::span<const double> y_prime, double alpha, const BootstrapConfig& config,
                             InnerTest inner, const EmConfig& em_config = {});

/// Dataset overload; throws std::domain_error when the dataset has no y_prime.
AdaptiveResult adaptive_test(const Dataset& data, double alpha, const BootstrapConfig& config, InnerTest inner,
                             const EmConfig& em_config = {});

}  // namespace nproxy
