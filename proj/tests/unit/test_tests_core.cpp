#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "nproxy/model.hpp"
#include "nproxy/tests_core.hpp"

using namespace nproxy;

TEST(NaiveTest, ZeroData) {
  const std::vector<double> y(4, 0.0);
  const TestResult r = naive_test(y, 0.05);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_FALSE(r.reject);
  EXPECT_FALSE(r.degenerate);
  EXPECT_EQ(r.test_name, "naive");
}

TEST(NaiveTest, OnesReject) {
  const std::vector<double> y(4, 1.0);
  const TestResult r = naive_test(y, 0.05);
  EXPECT_DOUBLE_EQ(r.statistic, 2.0);
  EXPECT_NEAR(r.threshold, 1.6448536269514722, 1e-12);
  EXPECT_TRUE(r.reject);
}

TEST(NaiveTest, ShiftLinearity) {
  RngStream rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> y(1 + rng.below(40));
    for (double& v : y) v = rng.normal();
    const double c = 4.0 * rng.uniform() - 2.0;
    std::vector<double> shifted = y;
    for (double& v : shifted) v += c;
    const double n = static_cast<double>(y.size());
    EXPECT_NEAR(naive_test(shifted, 0.05).statistic, naive_test(y, 0.05).statistic + std::sqrt(n) * c, 1e-12);
  }
}

TEST(NaiveTest, Errors) {
  EXPECT_THROW(naive_test({}, 0.05), std::domain_error);
  const std::vector<double> y{1.0};
  EXPECT_THROW(naive_test(y, 0.0), std::domain_error);
  EXPECT_THROW(naive_test(y, 1.0), std::domain_error);
}

TEST(WeightedTest, ConstantWeightsReduceToNaive) {
  RngStream rng(5);
  for (double c : {1.0, 0.5, 0.37, 1e-3}) {
    std::vector<double> y(30);
    for (double& v : y) v = rng.normal() + 0.3;
    const std::vector<double> gamma(y.size(), c);
    const TestResult w = weighted_test(y, gamma, 0.05);
    const TestResult n = naive_test(y, 0.05);
    EXPECT_NEAR(w.statistic, n.statistic, 1e-12);
    EXPECT_NEAR(w.std_error, 1.0 / std::sqrt(30.0), 1e-15);
    EXPECT_EQ(w.reject, n.reject);
  }
}

TEST(WeightedTest, SingleActiveWeight) {
  const std::vector<double> y{2.7, -5.0, 9.0};
  const std::vector<double> gamma{1.0, 0.0, 0.0};
  const TestResult r = weighted_test(y, gamma, 0.05);
  EXPECT_DOUBLE_EQ(r.estimate, 2.7);
  EXPECT_DOUBLE_EQ(r.std_error, 1.0);
  EXPECT_DOUBLE_EQ(r.statistic, 2.7);
  EXPECT_TRUE(r.reject);
}

TEST(WeightedTest, DirectEvaluation) {
  const std::vector<double> y{2.0, -1.0};
  const std::vector<double> gamma{0.5, 1.0};
  const TestResult r = weighted_test(y, gamma, 0.05);
  EXPECT_DOUBLE_EQ(r.estimate, 0.0);
  EXPECT_NEAR(r.std_error, 0.7453559924999299, 1e-15);
  EXPECT_DOUBLE_EQ(r.statistic, 0.0);
  EXPECT_FALSE(r.reject);
}

TEST(WeightedTest, ZeroWeightsAreFlaggedNotThrown) {
  const std::vector<double> y{5.0, 6.0};
  const std::vector<double> gamma{0.0, 0.0};
  const TestResult r = weighted_test(y, gamma, 0.05);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.reason, DegenerateReason::zero_weights);
  EXPECT_EQ(to_string(r.reason), "zero-weights");
  EXPECT_FALSE(r.reject);
}

TEST(WeightedTest, Errors) {
  const std::vector<double> y{1.0, 2.0};
  EXPECT_THROW(weighted_test(y, std::vector<double>{0.5}, 0.05), std::domain_error);
  EXPECT_THROW(weighted_test(y, std::vector<double>{0.5, 1.5}, 0.05), std::domain_error);
  EXPECT_THROW(weighted_test(y, std::vector<double>{0.5, -0.1}, 0.05), std::domain_error);
}

TEST(TestResult, RejectMatchesStatisticVsThreshold) {
  RngStream rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> y(10);
    std::vector<double> g(10);
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] = rng.normal() + 0.8;
      g[i] = rng.uniform();
    }
    for (const TestResult& r : {naive_test(y, 0.05), weighted_test(y, g, 0.05)}) {
      ASSERT_FALSE(r.degenerate);
      EXPECT_EQ(r.reject, r.statistic > r.threshold);
    }
  }
}

// Finite-sample validity under mu = 0 at alpha = 0.05 over 1e5 reps.
TEST(NullCalibration, BothTestsHoldLevel) {
  constexpr int kReps = 100000;
  constexpr double alpha = 0.05;
  ModelParams p;
  p.mu = 0.0;
  p.phi = 0.3;
  p.proxy = ProxySpec::from_label("pos2");
  int naive = 0;
  int wtd = 0;
  for (int rep = 0; rep < kReps; ++rep) {
    RngStream rng(12, {static_cast<std::uint64_t>(rep)});
    const Dataset d = generate_dataset(p, 20, rng);
    naive += naive_test(d.y, alpha).reject;
    wtd += weighted_test(d.y, d.gamma, alpha).reject;
  }
  const double bound = alpha + 3.0 * std::sqrt(alpha * (1 - alpha) / kReps);
  EXPECT_LE(naive / static_cast<double>(kReps), bound);
  EXPECT_LE(wtd / static_cast<double>(kReps), bound);
}

// Local alternatives mu_n = h / sqrt(n): centred, scaled estimators have the
// limiting mean and variance.
TEST(SamplingDistribution, NaiveAndWeightedLimits) {
  constexpr std::size_t n = 5000;
  constexpr int kReps = 4000;
  constexpr double h = 2.0;
  const double sn = std::sqrt(static_cast<double>(n));
  ModelParams p;
  p.phi = 0.3;
  p.mu = h / sn;
  p.proxy = ProxySpec::from_label("pos1");
  const ProxyMoments g = proxy_moments(p.proxy, p.phi);
  const double wtd_centre = p.mu * p.phi * g.e1_gamma / g.e_gamma;
  const double wtd_var = g.e_gamma_sq / (g.e_gamma * g.e_gamma);

  std::vector<double> naive_z(kReps);
  std::vector<double> wtd_z(kReps);
  for (int rep = 0; rep < kReps; ++rep) {
    RngStream rng(13, {static_cast<std::uint64_t>(rep)});
    const Dataset d = generate_dataset(p, n, rng);
    naive_z[rep] = sn * (naive_test(d.y, 0.05).estimate - p.mu * p.phi);
    wtd_z[rep] = sn * (weighted_test(d.y, d.gamma, 0.05).estimate - wtd_centre);
  }
  auto check = [&](const std::vector<double>& z, double var) {
    double s = 0.0;
    for (double v : z) s += v;
    const double mean = s / kReps;
    double ss = 0.0;
    for (double v : z) ss += (v - mean) * (v - mean);
    const double sample_var = ss / (kReps - 1);
    EXPECT_NEAR(mean, 0.0, 3.0 * std::sqrt(var / kReps));
    EXPECT_NEAR(sample_var, var, 3.0 * var * std::sqrt(2.0 / kReps));
  };
  check(naive_z, 1.0);
  check(wtd_z, wtd_var);
}
