#include "nproxy/model.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "nproxy/statdist.hpp"

namespace nproxy {

namespace {

const std::array<ProxySpec, 6> kRegimes{{
    {-0.9, -0.9, "HVar", std::nullopt},
    {0.0, 0.0, "Unif", std::nullopt},
    {0.1, -0.1, "Pos1", std::nullopt},
    {2.0, -0.25, "Pos2", std::nullopt},
    {-0.1, 0.1, "Neg1", std::nullopt},
    {-0.25, 2.0, "Neg2", std::nullopt},
}};

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

struct BetaMoments {
  double mean;
  double second;
};

BetaMoments beta_moments(double alpha, double beta) {
  const double s = alpha + beta;
  return {alpha / s, alpha * (alpha + 1.0) / (s * (s + 1.0))};
}

void check_phi(double phi) {
  if (!(phi > 0.0 && phi <= 1.0)) throw std::domain_error("phi must lie in (0, 1]");
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in (0, 1)");
}

}  // namespace

void ProxySpec::validate() const {
  if (constant) {
    if (!(*constant >= 0.0 && *constant <= 1.0)) throw std::domain_error("constant gamma must lie in [0, 1]");
    return;
  }
  if (!(a > -1.0) || !std::isfinite(a)) throw std::domain_error("proxy shape offset a must be > -1");
  if (!(b > -1.0) || !std::isfinite(b)) throw std::domain_error("proxy shape offset b must be > -1");
}

ProxySpec ProxySpec::from_label(std::string_view label) {
  const std::string key = lowercase(label);
  for (const auto& spec : kRegimes) {
    if (lowercase(spec.label) == key) return spec;
  }
  throw std::invalid_argument("unknown proxy regime '" + std::string(label) +
                              "' (expected hvar, unif, pos1, pos2, neg1, neg2)");
}

ProxySpec ProxySpec::constant_gamma(double c) {
  ProxySpec spec;
  spec.label = "Const";
  spec.constant = c;
  spec.validate();
  return spec;
}

std::span<const ProxySpec> standard_proxy_regimes() { return kRegimes; }

void ModelParams::validate() const {
  check_phi(phi);
  if (!(bound > 0.0)) throw std::domain_error("parameter bound K must be > 0");
  if (!std::isfinite(mu) || std::abs(mu) > bound) throw std::domain_error("mu must satisfy |mu| <= K");
  if (mu_prime && (*mu_prime == 0.0 || !std::isfinite(*mu_prime))) {
    throw std::domain_error("mu_prime must be finite and nonzero");
  }
  proxy.validate();
}

void Dataset::validate() const {
  const std::size_t n = y.size();
  if (n == 0) throw std::domain_error("dataset must have at least one row");
  if (gamma.size() != n) throw std::domain_error("gamma length differs from y length");
  if (y_prime && y_prime->size() != n) throw std::domain_error("y_prime length differs from y length");
  if (z && z->size() != n) throw std::domain_error("z length differs from y length");
  for (double g : gamma) {
    if (!(g >= 0.0 && g <= 1.0)) throw std::domain_error("gamma values must lie in [0, 1]");
  }
}

Dataset generate_dataset(const ModelParams& params, std::size_t n, RngStream& rng) {
  params.validate();
  if (n == 0) throw std::domain_error("generate_dataset: n must be >= 1");

  Dataset data;
  data.y.resize(n);
  data.gamma.resize(n);
  data.z.emplace(n);
  if (params.mu_prime) data.y_prime.emplace(n);

  const ProxySpec& proxy = params.proxy;
  for (std::size_t i = 0; i < n; ++i) {
    const bool z = rng.bernoulli(params.phi);
    (*data.z)[i] = z ? 1 : 0;
    data.gamma[i] = proxy.constant ? *proxy.constant : beta_sample(proxy.shape1(z), proxy.shape2(z), rng);
    data.y[i] = (z ? params.mu : 0.0) + rng.normal();
    if (params.mu_prime) (*data.y_prime)[i] = (z ? *params.mu_prime : 0.0) + rng.normal();
  }
  return data;
}

ProxyMoments proxy_moments(const ProxySpec& spec, double phi) {
  spec.validate();
  check_phi(phi);
  ProxyMoments m{};
  if (spec.constant) {
    const double c = *spec.constant;
    m.e1_gamma = m.e0_gamma = c;
    m.e1_gamma_sq = m.e0_gamma_sq = c * c;
  } else {
    const BetaMoments one = beta_moments(spec.shape1(true), spec.shape2(true));
    const BetaMoments zero = beta_moments(spec.shape1(false), spec.shape2(false));
    m.e1_gamma = one.mean;
    m.e0_gamma = zero.mean;
    m.e1_gamma_sq = one.second;
    m.e0_gamma_sq = zero.second;
  }
  m.e_gamma = phi * m.e1_gamma + (1.0 - phi) * m.e0_gamma;
  m.e_gamma_sq = phi * m.e1_gamma_sq + (1.0 - phi) * m.e0_gamma_sq;
  m.var_gamma = spec.constant ? 0.0 : m.e_gamma_sq - m.e_gamma * m.e_gamma;
  return m;
}

EfficiencyReport pitman_efficiency(const ProxySpec& spec, double phi) {
  const ProxyMoments m = proxy_moments(spec, phi);
  if (!(m.var_gamma > 0.0)) throw std::domain_error("pitman_efficiency: proxy distribution is degenerate");
  EfficiencyReport r{};
  r.psi_sq = m.e1_gamma * m.e1_gamma / m.e_gamma_sq;
  r.psi = std::sqrt(r.psi_sq);
  r.bias_factor = m.e1_gamma / m.e_gamma;
  r.variance_factor = 1.0 + m.var_gamma / (m.e_gamma * m.e_gamma);
  return r;
}

double asymptotic_power_naive(double h, double phi, double alpha) {
  return asymptotic_power_weighted(h, phi, 1.0, alpha);
}

double asymptotic_power_weighted(double h, double phi, double psi, double alpha) {
  if (!(h >= 0.0)) throw std::domain_error("local-alternative scale h must be >= 0");
  check_phi(phi);
  check_alpha(alpha);
  return normal_sf(upper_critical_value(alpha) - h * phi * psi);
}

}  // namespace nproxy
