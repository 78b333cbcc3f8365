#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nproxy/adaptive.hpp"
#include "nproxy/model.hpp"
#include "nproxy/working_mle.hpp"

namespace nproxy {

enum class TestKind { naive, wtd, wtd_plus, a_wtd, a_wtd_plus };

std::string_view to_string(TestKind kind) noexcept;
/// Accepts naive, wtd, wtd+, a_wtd, a_wtd+.
TestKind parse_test_kind(std::string_view text);
std::vector<TestKind> all_test_kinds();

/// How the positive-control shift mu' is chosen for a design cell.
struct MuPrimeRule {
  enum class Kind { fixed, delta };
  Kind kind = Kind::delta;
  double value = 5.0;

  /// fixed: mu' = value.  delta: mu' = value / (phi * sqrt(n)).
  [[nodiscard]] double resolve(double phi, std::size_t n) const;
  static MuPrimeRule fixed(double mu_prime) { return {Kind::fixed, mu_prime}; }
  static MuPrimeRule delta(double delta_prime) { return {Kind::delta, delta_prime}; }
};

/// absolute: mu_grid holds effect sizes.  local: it holds h, and mu = h / sqrt(n).
enum class EffectScale { absolute, local };

struct ExperimentConfig {
  std::vector<ProxySpec> proxy_specs;
  std::vector<double> phi_grid;
  std::vector<std::size_t> n_grid;
  std::vector<double> mu_grid;
  EffectScale effect_scale = EffectScale::absolute;
  MuPrimeRule mu_prime_rule;
  double alpha = 1e-4;
  std::size_t reps = 2000;
  std::vector<TestKind> tests = all_test_kinds();
  BootstrapConfig bootstrap;  // rng is ignored; each rep derives its own
  EmConfig em;
  std::uint64_t root_seed = 0;
  unsigned threads = 1;

  void validate() const;
};

struct ResultRow {
  std::string proxy_label;
  double a = 0.0;
  double b = 0.0;
  double phi = 0.0;
  std::size_t n = 0;
  double mu = 0.0;
  std::string test_name;
  double reject_rate = 0.0;
  double mc_se = 0.0;
  std::size_t reps = 0;
  double alpha = 0.0;
  std::optional<double> theory_power;
};

using PowerTable = std::vector<ResultRow>;
using CalibrationTable = std::vector<ResultRow>;

struct AgreementRow {
  std::string proxy_label;
  double a = 0.0;
  double b = 0.0;
  double phi = 0.0;
  std::size_t n = 0;
  double mu = 0.0;
  double agreement_rate = 0.0;
  double mc_se = 0.0;
  std::size_t reps = 0;
  double alpha = 0.0;
};

using AgreementTable = std::vector<AgreementRow>;

/// Binomial Monte Carlo standard error sqrt(p (1 - p) / reps).
double binomial_mc_se(double rate, std::size_t reps);

/// Rejection rates of every configured test in every (proxy, phi, n, mu) cell.
/// All tests in a rep share one simulated dataset. Theory power is attached
/// to naive and wtd rows. Requires at least one mu > 0.
PowerTable run_power_experiment(const ExperimentConfig& config);

/// As run_power_experiment with mu forced to 0 (mu_grid is ignored).
CalibrationTable run_calibration_experiment(const ExperimentConfig& config);

/// Fraction of reps in which the wtd and wtd+ decisions coincide, per cell.
AgreementTable run_agreement_experiment(const ExperimentConfig& config);

inline constexpr std::string_view kResultCsvHeader =
    "proxy_label,a,b,phi,n,mu,test_name,reject_rate,mc_se,reps,alpha,theory_power";
inline constexpr std::string_view kAgreementCsvHeader =
    "proxy_label,a,b,phi,n,mu,agreement_rate,mc_se,reps,alpha";

void write_result_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_agreement_csv(std::ostream& out, const AgreementTable& rows);

}  // namespace nproxy
