#pragma once

#include "nproxy/rng.hpp"

namespace nproxy {

/// Density of N(mean, 1) at y.
double normal_pdf(double y, double mean = 0.0) noexcept;
/// log of normal_pdf, without underflow.
double normal_log_pdf(double y, double mean = 0.0) noexcept;

/// Standard normal CDF, accurate in both tails.
double normal_cdf(double x) noexcept;
/// 1 - normal_cdf(x) without cancellation.
double normal_sf(double x) noexcept;

/// Inverse of the standard normal CDF. Throws std::domain_error unless 0 < p < 1.
///
/// Acklam's rational approximation (relative error ~1.2e-9) polished by one
/// Newton step on the erfc-based CDF. The upper half is computed from the
/// lower tail by symmetry; 1 - p is exact there, so deep upper quantiles such
/// as z_{1-1e-4} keep full precision.
double normal_quantile(double p);

/// z_{1-alpha}, the one-sided upper critical value. Equal to -normal_quantile(alpha).
double upper_critical_value(double alpha);

/// One draw from Beta(alpha, beta), any shapes > 0.
///
/// Cheng's algorithm BB when both shapes exceed 1 and algorithm BC otherwise
/// (Cheng 1978, "Generating beta variates with nonintegral shape parameters").
/// Values within rounding of an endpoint may come back as exactly 0 or 1.
/// Throws std::domain_error on non-positive or non-finite shapes.
double beta_sample(double alpha, double beta, RngStream& rng);

}  // namespace nproxy
