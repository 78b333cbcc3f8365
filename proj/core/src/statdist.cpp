#include "nproxy/statdist.hpp"

#include <cfloat>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nproxy {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2*pi))

// Lower-half quantile, p in (0, 0.5].
double lower_quantile(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }

  // Newton on F(x) = Phi(x) - p.
  const double density = normal_pdf(x);
  if (density > 0.0) x -= (normal_cdf(x) - p) / density;
  return x;
}

}  // namespace

double normal_pdf(double y, double mean) noexcept {
  const double d = y - mean;
  return std::exp(-0.5 * d * d) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_log_pdf(double y, double mean) noexcept {
  const double d = y - mean;
  return -0.5 * d * d - kLogSqrt2Pi;
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) noexcept { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("normal_quantile: p must lie in (0, 1), got " + std::to_string(p));
  }
  if (p == 0.5) return 0.0;
  if (p < 0.5) return lower_quantile(p);
  return -lower_quantile(1.0 - p);
}

double upper_critical_value(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("upper_critical_value: alpha must lie in (0, 1)");
  }
  return -normal_quantile(alpha);
}

double beta_sample(double alpha, double beta, RngStream& rng) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw std::domain_error("beta_sample: shapes must be finite and > 0");
  }
  constexpr double kExpMax = DBL_MAX_EXP * std::numbers::ln2;
  const double a = std::min(alpha, beta);
  const double b = std::max(alpha, beta);
  const double sum = a + b;

  auto scaled_exp = [&](double scale, double v) {
    if (v > kExpMax) return DBL_MAX;
    const double w = scale * std::exp(v);
    return std::isfinite(w) ? w : DBL_MAX;
  };

  if (a <= 1.0) {
    // Algorithm BC, a = min shape.
    const double inv_a = 1.0 / a;
    const double delta = 1.0 + b - a;
    const double k1 = delta * (0.0138889 + 0.0416667 * a) / (b * inv_a - 0.777778);
    const double k2 = 0.25 + (0.5 + 0.25 / delta) * a;
    double v = 0.0;
    double w = 0.0;
    for (;;) {
      const double u1 = rng.uniform();
      const double u2 = rng.uniform();
      double z;
      if (u1 < 0.5) {
        const double y = u1 * u2;
        z = u1 * y;
        if (0.25 * u2 + z - y >= k1) continue;
      } else {
        z = u1 * u1 * u2;
        if (z <= 0.25) {
          v = inv_a * std::log(u1 / (1.0 - u1));
          w = scaled_exp(b, v);
          break;
        }
        if (z >= k2) continue;
      }
      v = inv_a * std::log(u1 / (1.0 - u1));
      w = scaled_exp(b, v);
      if (sum * (std::log(sum / (a + w)) + v) - 1.3862944 >= std::log(z)) break;
    }
    return alpha == a ? a / (a + w) : w / (a + w);
  }

  // Algorithm BB, both shapes > 1.
  const double scale = std::sqrt((sum - 2.0) / (2.0 * a * b - sum));
  const double gamma = a + 1.0 / scale;
  double w;
  for (;;) {
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    const double v = scale * std::log(u1 / (1.0 - u1));
    w = scaled_exp(a, v);
    const double z = u1 * u1 * u2;
    const double r = gamma * v - 1.3862944;
    const double s = a + r - w;
    if (s + 2.609438 >= 5.0 * z) break;
    const double t = std::log(z);
    if (s > t) break;
    if (r + sum * std::log(sum / (b + w)) >= t) break;
  }
  return alpha != a ? b / (b + w) : w / (b + w);
}

}  // namespace nproxy
