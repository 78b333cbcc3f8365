#include "nproxy/working_mle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nproxy/statdist.hpp"

namespace nproxy {

void EmConfig::validate() const {
  if (!(tol > 0.0)) throw std::domain_error("EM tolerance must be > 0");
  if (max_iter < 1) throw std::domain_error("EM max_iter must be >= 1");
  if (!(search_bound > 0.0)) throw std::domain_error("EM search bound must be > 0");
  if (verify_grid && *verify_grid < 2) throw std::domain_error("EM verify_grid needs >= 2 points");
}

double working_loglik(double mu, std::span<const double> y, std::span<const double> gamma) {
  check_weights(y, gamma);
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double g = gamma[i];
    const double log_null = normal_log_pdf(y[i], 0.0);
    const double log_alt = normal_log_pdf(y[i], mu);
    if (g == 0.0) {
      total += log_null;
    } else if (g == 1.0) {
      total += log_alt;
    } else {
      const double a = std::log1p(-g) + log_null;
      const double b = std::log(g) + log_alt;
      const double hi = std::max(a, b);
      total += hi + std::log1p(std::exp(std::min(a, b) - hi));
    }
  }
  return total;
}

double posterior_weight(double y, double gamma, double mu) noexcept {
  if (gamma == 0.0 || gamma == 1.0) return gamma;
  // log[(1-g) N(y|0)] - log[g N(y|mu)] = log((1-g)/g) + mu^2/2 - y mu
  const double t = std::log1p(-gamma) - std::log(gamma) + mu * (0.5 * mu - y);
  const double e = std::exp(-std::abs(t));
  return t > 0.0 ? e / (1.0 + e) : 1.0 / (1.0 + e);
}

double louis_information(double mu_hat, std::span<const double> gamma_hat, std::span<const double> y) {
  check_weights(y, gamma_hat);
  double complete = 0.0;
  double missing = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double g = gamma_hat[i];
    const double r = y[i] - mu_hat;
    complete += g;
    missing += g * (1.0 - g) * r * r;
  }
  return complete - missing;
}

std::optional<double> louis_se(double mu_hat, std::span<const double> gamma_hat, std::span<const double> y) {
  const double info = louis_information(mu_hat, gamma_hat, y);
  if (!(info > 0.0)) return std::nullopt;
  return 1.0 / std::sqrt(info);
}

EmFit em_fit(std::span<const double> y, std::span<const double> gamma, const EmConfig& config) {
  check_weights(y, gamma);
  config.validate();
  if (std::all_of(gamma.begin(), gamma.end(), [](double g) { return g == 0.0; })) {
    throw std::domain_error("em_fit: all weights are zero, mu is not identified");
  }

  const double bound = config.search_bound;
  const std::size_t n = y.size();
  EmFit fit;
  fit.gamma_hat.assign(gamma.begin(), gamma.end());

  // log((1 - g) / g) per row; infinite at the endpoints, which are fixed points.
  std::vector<double> prior_log_odds(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = gamma[i];
    prior_log_odds[i] = (g == 0.0 || g == 1.0) ? 0.0 : std::log1p(-g) - std::log(g);
  }

  double previous = std::numeric_limits<double>::quiet_NaN();
  for (int iter = 1; iter <= config.max_iter; ++iter) {
    double sum_g = 0.0;
    double sum_gy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sum_g += fit.gamma_hat[i];
      sum_gy += fit.gamma_hat[i] * y[i];
    }
    if (sum_g == 0.0) break;  // posteriors underflowed everywhere; keep the last iterate
    double mu = sum_gy / sum_g;
    if (mu > bound || mu < -bound) {
      mu = std::clamp(mu, -bound, bound);
      fit.clamped = true;
    }

    // E-step and working log-likelihood at mu share the same log-odds.
    double loglik = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double g = gamma[i];
      if (g == 0.0) {
        loglik += normal_log_pdf(y[i], 0.0);
        continue;
      }
      if (g == 1.0) {
        loglik += normal_log_pdf(y[i], mu);
        continue;
      }
      const double t = prior_log_odds[i] + mu * (0.5 * mu - y[i]);
      const double e = std::exp(-std::abs(t));
      fit.gamma_hat[i] = t > 0.0 ? e / (1.0 + e) : 1.0 / (1.0 + e);
      const double softplus = std::max(t, 0.0) + std::log1p(e);
      loglik += std::log(g) + normal_log_pdf(y[i], mu) + softplus;
    }

    fit.mu_hat = mu;
    fit.iterations = iter;
    fit.mu_trace.push_back(mu);
    fit.loglik_trace.push_back(loglik);
    if (iter > 1 && std::abs(mu - previous) < config.tol) {
      fit.converged = true;
      break;
    }
    previous = mu;
  }

  fit.loglik = fit.loglik_trace.empty() ? working_loglik(fit.mu_hat, y, gamma) : fit.loglik_trace.back();
  fit.info = louis_information(fit.mu_hat, fit.gamma_hat, y);
  if (fit.info > 0.0) fit.std_error = 1.0 / std::sqrt(fit.info);

  if (config.verify_grid) {
    const auto curve = loglik_profile(y, gamma, {-bound, bound, *config.verify_grid});
    const auto best = std::max_element(curve.begin(), curve.end(),
                                       [](const auto& l, const auto& r) { return l.second < r.second; });
    const double step = 2.0 * bound / static_cast<double>(*config.verify_grid - 1);
    fit.grid_argmax = best->first;
    fit.grid_verified = std::abs(best->first - fit.mu_hat) <= step + config.tol;
  }
  return fit;
}

TestResult wtd_plus_test(std::span<const double> y, std::span<const double> gamma, double alpha,
                         const EmConfig& config) {
  check_weights(y, gamma);
  check_level(alpha);
  if (std::all_of(gamma.begin(), gamma.end(), [](double g) { return g == 0.0; })) {
    return make_degenerate_result("wtd+", y.size(), std::numeric_limits<double>::quiet_NaN(), alpha,
                                  DegenerateReason::zero_weights);
  }
  const EmFit fit = em_fit(y, gamma, config);
  if (!fit.std_error) {
    return make_degenerate_result("wtd+", y.size(), fit.mu_hat, alpha, DegenerateReason::nonpositive_information);
  }
  return make_result("wtd+", y.size(), fit.mu_hat, *fit.std_error, alpha);
}

std::vector<std::pair<double, double>> loglik_profile(std::span<const double> y, std::span<const double> gamma,
                                                      const ProfileGrid& grid) {
  if (!(grid.lo < grid.hi)) throw std::domain_error("loglik_profile: need lo < hi");
  if (grid.num_points < 2) throw std::domain_error("loglik_profile: need at least 2 grid points");
  check_weights(y, gamma);
  std::vector<std::pair<double, double>> curve;
  curve.reserve(grid.num_points);
  const double step = (grid.hi - grid.lo) / static_cast<double>(grid.num_points - 1);
  for (std::size_t k = 0; k < grid.num_points; ++k) {
    const double mu = k + 1 == grid.num_points ? grid.hi : grid.lo + step * static_cast<double>(k);
    curve.emplace_back(mu, working_loglik(mu, y, gamma));
  }
  return curve;
}

std::size_t count_local_maxima(std::span<const std::pair<double, double>> curve) {
  if (curve.size() < 2) return curve.size();
  // Sign of each nonzero difference; flat runs inherit the previous sign.
  std::size_t maxima = 0;
  int last_sign = 0;
  for (std::size_t k = 1; k < curve.size(); ++k) {
    const double d = curve[k].second - curve[k - 1].second;
    const int sign = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (sign == 0) continue;
    if (last_sign == 0 && sign < 0) ++maxima;  // decreasing from the left end
    if (last_sign > 0 && sign < 0) ++maxima;
    last_sign = sign;
  }
  if (last_sign > 0) ++maxima;  // increasing into the right end
  return maxima;
}

}  // namespace nproxy
