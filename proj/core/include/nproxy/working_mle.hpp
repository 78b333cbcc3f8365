#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "nproxy/model.hpp"
#include "nproxy/tests_core.hpp"

namespace nproxy {

struct EmConfig {
  double tol = 1e-10;
  int max_iter = 500;
  double search_bound = kDefaultMuBound;
  /// When set, the fit is checked against the argmax of the working
  /// log-likelihood on this many evenly spaced points over [-K, K].
  std::optional<std::size_t> verify_grid;

  void validate() const;
};

/// Maximum-likelihood fit of mu in the working model
///   Z_i | gamma_i ~ Ber(gamma_i),  Y_i | Z_i ~ N(mu Z_i, 1).
struct EmFit {
  double mu_hat = 0.0;
  std::vector<double> gamma_hat;  // E-step posteriors at mu_hat
  double info = 0.0;              // Louis observed information at mu_hat
  std::optional<double> std_error;  // 1/sqrt(info); empty when info <= 0
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  bool clamped = false;  // some M-step hit the [-K, K] bound
  std::vector<double> mu_trace;      // mu after each M-step
  std::vector<double> loglik_trace;  // working log-likelihood at each mu_trace entry

  // Filled only when EmConfig::verify_grid is set.
  std::optional<double> grid_argmax;
  bool grid_verified = false;
};

/// sum_i log((1 - g_i) N(y_i | 0) + g_i N(y_i | mu)), evaluated with log-sum-exp.
double working_loglik(double mu, std::span<const double> y, std::span<const double> gamma);

/// E-step posterior P(Z_i = 1 | y_i, gamma_i) at mu.
double posterior_weight(double y, double gamma, double mu) noexcept;

/// EM for the working model, started from gamma_hat = gamma with the M-step
/// first, so the first iterate is the fixed-weight estimate.
/// Throws std::domain_error on invalid input, including all-zero gamma.
EmFit em_fit(std::span<const double> y, std::span<const double> gamma, const EmConfig& config = {});

/// Louis information sum g - sum g (1 - g) (y - mu)^2.
double louis_information(double mu_hat, std::span<const double> gamma_hat, std::span<const double> y);
/// 1/sqrt(info), or nullopt when the information is not positive.
std::optional<double> louis_se(double mu_hat, std::span<const double> gamma_hat, std::span<const double> y);

/// Test on the working-model MLE with the Louis standard error. All-zero
/// gamma and nonpositive information both yield a flagged non-rejection.
TestResult wtd_plus_test(std::span<const double> y, std::span<const double> gamma, double alpha,
                         const EmConfig& config = {});

struct ProfileGrid {
  double lo;
  double hi;
  std::size_t num_points;
};

/// Working log-likelihood on an evenly spaced grid, as (mu, loglik) pairs.
std::vector<std::pair<double, double>> loglik_profile(std::span<const double> y, std::span<const double> gamma,
                                                      const ProfileGrid& grid);

/// Number of local maxima of a sampled curve (sign changes + to - of the
/// discrete differences, counting a maximum at either end).
std::size_t count_local_maxima(std::span<const std::pair<double, double>> curve);

}  // namespace nproxy
