#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nproxy/rng.hpp"

namespace nproxy {

/// Default bound K on |mu|, shared by the generator and the EM search.
inline constexpr double kDefaultMuBound = 10.0;

/// Conditional law of the proxy gamma given the latent Z:
///   gamma | Z=1 ~ Beta(1 + a, 1 + b),  gamma | Z=0 ~ Beta(1 + b, 1 + a).
/// `constant` replaces both laws with a point mass (used to force the
/// degenerate gamma == c regime in tests and experiments).
struct ProxySpec {
  double a = 0.0;
  double b = 0.0;
  std::string label = "custom";
  std::optional<double> constant;

  /// Shapes (alpha, beta) of gamma given Z.
  [[nodiscard]] double shape1(bool z) const noexcept { return 1.0 + (z ? a : b); }
  [[nodiscard]] double shape2(bool z) const noexcept { return 1.0 + (z ? b : a); }

  void validate() const;

  /// One of hvar, unif, pos1, pos2, neg1, neg2 (case-insensitive).
  static ProxySpec from_label(std::string_view label);
  static ProxySpec constant_gamma(double c);
};

/// The six named proxy regimes, in table order HVar, Unif, Pos1, Pos2, Neg1, Neg2.
std::span<const ProxySpec> standard_proxy_regimes();

struct ModelParams {
  double mu = 0.0;
  double phi = 0.5;
  std::optional<double> mu_prime;
  ProxySpec proxy;
  double bound = kDefaultMuBound;

  void validate() const;
};

/// One experiment's observations. `z` is retained by the simulator for
/// diagnostics only; inference code never reads it.
struct Dataset {
  std::vector<double> y;
  std::vector<double> gamma;
  std::optional<std::vector<double>> y_prime;
  std::optional<std::vector<int>> z;

  [[nodiscard]] std::size_t size() const noexcept { return y.size(); }
  void validate() const;
};

/// Draws n i.i.d. rows (Z, gamma, Y, Y') from the augmented model. y_prime is
/// populated iff params.mu_prime is set.
Dataset generate_dataset(const ModelParams& params, std::size_t n, RngStream& rng);

struct ProxyMoments {
  double e1_gamma;     // E[gamma | Z=1]
  double e0_gamma;     // E[gamma | Z=0]
  double e1_gamma_sq;  // E[gamma^2 | Z=1]
  double e0_gamma_sq;  // E[gamma^2 | Z=0]
  double e_gamma;
  double e_gamma_sq;
  double var_gamma;
};

ProxyMoments proxy_moments(const ProxySpec& spec, double phi);

struct EfficiencyReport {
  double psi;
  double psi_sq;
  double bias_factor;      // E[gamma|Z=1] / E[gamma]
  double variance_factor;  // 1 + cv^2[gamma]
};

/// Pitman efficiency of the weighted test relative to the naive test.
/// Throws std::domain_error when Var[gamma] == 0.
EfficiencyReport pitman_efficiency(const ProxySpec& spec, double phi);

/// 1 - Phi(z_{1-alpha} - h*phi).
double asymptotic_power_naive(double h, double phi, double alpha);
/// 1 - Phi(z_{1-alpha} - h*phi*psi).
double asymptotic_power_weighted(double h, double phi, double psi, double alpha);

}  // namespace nproxy
