#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nproxy/harness.hpp"

using namespace nproxy;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.proxy_specs = {ProxySpec::from_label("pos2"), ProxySpec::from_label("hvar")};
  c.phi_grid = {0.3};
  c.n_grid = {40};
  c.mu_grid = {0.0, 2.0};
  c.alpha = 0.05;
  c.reps = 60;
  c.bootstrap.n_resamples = 100;
  c.root_seed = 5;
  return c;
}

std::string csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  write_result_csv(out, rows);
  return out.str();
}

}  // namespace

TEST(Harness, TestKindNames) {
  for (TestKind k : all_test_kinds()) EXPECT_EQ(parse_test_kind(to_string(k)), k);
  EXPECT_THROW(parse_test_kind("wtd++"), std::invalid_argument);
}

TEST(Harness, MuPrimeRule) {
  EXPECT_DOUBLE_EQ(MuPrimeRule::fixed(2.0).resolve(0.3, 75), 2.0);
  EXPECT_DOUBLE_EQ(MuPrimeRule::delta(3.0).resolve(0.5, 16), 1.5);
}

TEST(Harness, PowerTableShapeAndTally) {
  const PowerTable t = run_power_experiment(small_config());
  ASSERT_EQ(t.size(), 2u * 2u * 5u);
  for (const ResultRow& r : t) {
    EXPECT_GE(r.reject_rate, 0.0);
    EXPECT_LE(r.reject_rate, 1.0);
    EXPECT_DOUBLE_EQ(r.mc_se, std::sqrt(r.reject_rate * (1.0 - r.reject_rate) / r.reps));
    const double k = r.reject_rate * r.reps;
    EXPECT_NEAR(k, std::round(k), 1e-9);
    EXPECT_EQ(r.theory_power.has_value(), r.test_name == "naive" || r.test_name == "wtd");
  }
  EXPECT_EQ(csv(t).substr(0, csv(t).find('\n')), kResultCsvHeader);
}

TEST(Harness, DeterministicAcrossRunsAndThreads) {
  ExperimentConfig c = small_config();
  c.reps = 1;
  EXPECT_EQ(csv(run_power_experiment(c)), csv(run_power_experiment(c)));
  c.reps = 50;
  c.threads = 1;
  const std::string one = csv(run_power_experiment(c));
  c.threads = 4;
  EXPECT_EQ(csv(run_power_experiment(c)), one);
  c.root_seed = 6;
  EXPECT_NE(csv(run_power_experiment(c)), one);
}

TEST(Harness, CalibrationForcesNull) {
  ExperimentConfig c = small_config();
  c.mu_grid = {5.0};
  const CalibrationTable t = run_calibration_experiment(c);
  ASSERT_EQ(t.size(), 2u * 5u);
  for (const ResultRow& r : t) EXPECT_EQ(r.mu, 0.0);
}

TEST(Harness, NullRowsStayNearLevel) {
  ExperimentConfig c = small_config();
  c.reps = 2000;
  c.mu_grid = {0.0, 1.0};
  for (const ResultRow& r : run_power_experiment(c)) {
    if (r.mu == 0.0) EXPECT_LE(r.reject_rate, r.alpha + 3.0 * std::sqrt(r.alpha * (1 - r.alpha) / r.reps));
  }
}

TEST(Harness, LocalEffectScale) {
  ExperimentConfig c = small_config();
  c.effect_scale = EffectScale::local;
  c.n_grid = {100};
  c.mu_grid = {3.0};
  c.tests = {TestKind::naive};
  const PowerTable t = run_power_experiment(c);
  EXPECT_DOUBLE_EQ(t.front().mu, 0.3);
  EXPECT_NEAR(*t.front().theory_power, asymptotic_power_naive(3.0, 0.3, 0.05), 1e-12);
}

TEST(Harness, ConstantProxiesAgreeExactly) {
  ExperimentConfig c = small_config();
  c.proxy_specs = {ProxySpec::constant_gamma(1.0)};
  c.mu_grid = {0.0, 0.5, 2.0};
  c.reps = 200;
  const AgreementTable t = run_agreement_experiment(c);
  ASSERT_EQ(t.size(), 3u);
  for (const AgreementRow& r : t) {
    EXPECT_EQ(r.agreement_rate, 1.0);
    EXPECT_EQ(r.mc_se, 0.0);
  }
  std::ostringstream out;
  write_agreement_csv(out, t);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), kAgreementCsvHeader);
}

TEST(Harness, ValidationBeforeWork) {
  ExperimentConfig c = small_config();
  c.phi_grid.clear();
  EXPECT_THROW(run_power_experiment(c), std::domain_error);
  c = small_config();
  c.mu_grid = {0.0};
  EXPECT_THROW(run_power_experiment(c), std::domain_error);
  c = small_config();
  c.mu_grid = {11.0};
  EXPECT_THROW(run_power_experiment(c), std::domain_error);
  c = small_config();
  c.reps = 0;
  EXPECT_THROW(run_calibration_experiment(c), std::domain_error);
  c = small_config();
  c.bootstrap.n_resamples = 10;
  EXPECT_THROW(run_calibration_experiment(c), std::domain_error);
  c.tests = {TestKind::naive, TestKind::wtd};
  EXPECT_NO_THROW(run_calibration_experiment(c));
}
