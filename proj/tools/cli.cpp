#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "config.hpp"
#include "nproxy/adaptive.hpp"
#include "nproxy/dataset_io.hpp"
#include "nproxy/harness.hpp"
#include "nproxy/tests_core.hpp"
#include "nproxy/working_mle.hpp"

namespace nproxy::cli {
namespace {

struct FlagSpec {
  const char* flag;
  const char* key;
  const char* help;
};

constexpr FlagSpec kModelFlags[] = {
    {"--proxy", "proxy", "proxy regime: hvar, unif, pos1, pos2, neg1, neg2, const:<c> or beta:<a>:<b>"},
    {"--a", "a", "override the regime's a parameter"},
    {"--b", "b", "override the regime's b parameter"},
    {"--phi", "phi", "P(Z = 1)"},
    {"--n", "n", "sample size"},
    {"--mu", "mu", "effect size"},
    {"--mu-prime", "mu_prime", "positive-control shift mu'"},
    {"--mu-prime-delta", "mu_prime_delta", "set mu' = delta / (phi sqrt(n))"},
};
constexpr FlagSpec kExperimentFlags[] = {
    {"--effect-scale", "effect_scale", "absolute (mu grid holds mu) or local (mu grid holds h, mu = h / sqrt(n))"},
    {"--reps", "reps", "Monte Carlo replications per cell"},
};
constexpr FlagSpec kTestFlags[] = {
    {"--alpha", "alpha", "test level"},
    {"--tests", "tests", "comma list of naive, wtd, wtd+, a_wtd, a_wtd+"},
};
constexpr FlagSpec kEmFlags[] = {
    {"--em-tol", "em.tol", "EM convergence tolerance on mu"},
    {"--em-max-iter", "em.max_iter", "EM iteration cap"},
    {"--em-search-bound", "em.search_bound", "bound K on |mu|"},
};
constexpr FlagSpec kBootstrapFlags[] = {
    {"--resamples", "bootstrap.resamples", "bootstrap resamples B"},
    {"--alpha-prime", "bootstrap.alpha_prime", "level of the upper bound for psi"},
    {"--method", "bootstrap.method", "basic or percentile"},
};
constexpr FlagSpec kProfileFlags[] = {
    {"--lo", "profile.lo", "lower end of the mu grid"},
    {"--hi", "profile.hi", "upper end of the mu grid"},
    {"--points", "profile.points", "number of grid points"},
};

struct BoundFlag {
  CLI::Option* option;
  std::string key;
  std::string flag;
  std::unique_ptr<std::string> value;
};

class Flags {
 public:
  template <std::size_t N>
  void add(CLI::App* app, const FlagSpec (&specs)[N]) {
    for (const FlagSpec& s : specs) {
      auto value = std::make_unique<std::string>();
      CLI::Option* opt = app->add_option(s.flag, *value, s.help);
      bound_.push_back({opt, s.key, s.flag, std::move(value)});
    }
  }
  void add(CLI::App* app, const char* flag, const char* key, const char* help) {
    auto value = std::make_unique<std::string>();
    CLI::Option* opt = app->add_option(flag, *value, help);
    bound_.push_back({opt, key, flag, std::move(value)});
  }
  void apply(Settings& settings) const {
    for (const BoundFlag& b : bound_) {
      if (b.option->count() > 0) settings.set(b.key, *b.value, b.flag);
    }
  }

 private:
  std::vector<BoundFlag> bound_;
};

// Malformed input file; the message carries the path, line and field.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string bool_text(bool b) { return b ? "true" : "false"; }

Dataset read_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file '" + path + "'");
  try {
    return read_dataset_csv(in);
  } catch (const ParseError& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_test_rows(std::ostream& out, const std::vector<std::pair<TestResult, std::string>>& rows) {
  out << "test_name,n,estimate,std_error,statistic,threshold,alpha,reject,degenerate,reason,branch\n";
  for (const auto& [r, branch] : rows) {
    out << r.test_name << ',' << r.n << ',' << format_number(r.estimate) << ',' << format_number(r.std_error) << ','
        << format_number(r.statistic) << ',' << format_number(r.threshold) << ',' << format_number(r.alpha) << ','
        << bool_text(r.reject) << ',' << bool_text(r.degenerate) << ','
        << (r.degenerate ? to_string(r.reason) : std::string_view{}) << ',' << branch << '\n';
  }
}

void cmd_generate(const Settings& s, std::ostream& out) {
  const ModelParams params = model_params(s);
  const std::size_t n = sample_size(s);
  RngStream rng(seed(s));
  write_dataset_csv(out, generate_dataset(params, n, rng));
}

void cmd_test(const Settings& s, const std::string& input, std::ostream& out) {
  const Dataset data = read_input(input);
  const double alpha = level(s);
  const std::vector<TestKind> kinds = test_kinds(s, data.y_prime.has_value());
  const EmConfig em = em_config(s);
  const bool adaptive = std::any_of(kinds.begin(), kinds.end(), [](TestKind k) {
    return k == TestKind::a_wtd || k == TestKind::a_wtd_plus;
  });
  const BootstrapConfig boot = adaptive ? bootstrap_config(s) : BootstrapConfig{};

  std::vector<std::pair<TestResult, std::string>> rows;
  for (TestKind kind : kinds) {
    switch (kind) {
      case TestKind::naive:
        rows.emplace_back(naive_test(data.y, alpha), "");
        break;
      case TestKind::wtd:
        rows.emplace_back(weighted_test(data.y, data.gamma, alpha), "");
        break;
      case TestKind::wtd_plus:
        rows.emplace_back(wtd_plus_test(data.y, data.gamma, alpha, em), "");
        break;
      case TestKind::a_wtd:
      case TestKind::a_wtd_plus: {
        const InnerTest inner = kind == TestKind::a_wtd ? InnerTest::wtd : InnerTest::wtd_plus;
        const AdaptiveResult a = adaptive_test(data, alpha, boot, inner, em);
        rows.emplace_back(a.result, std::string(to_string(a.branch)));
        break;
      }
    }
  }
  write_test_rows(out, rows);
}

void cmd_psi(const Settings& s, const std::string& input, std::ostream& out) {
  const Dataset data = read_input(input);
  if (!data.y_prime) throw std::domain_error(input + ": psi needs a y_prime column");
  const BootstrapConfig boot = bootstrap_config(s);
  const UpperBound u = bootstrap_upper_bound(data.gamma, *data.y_prime, boot);
  out << "psi_hat,upper_bound,alpha_prime,method,branch\n";
  out << format_number(u.estimate.psi_hat) << ',' << format_number(u.value) << ',' << format_number(boot.alpha_prime)
      << ',' << to_string(boot.method) << ',' << to_string(select_branch(u.value)) << '\n';
}

void cmd_profile(const Settings& s, const std::string& input, std::ostream& out) {
  const Dataset data = read_input(input);
  const ProfileGrid grid = profile_grid(s);
  out << "mu,loglik\n";
  for (const auto& [mu, ll] : loglik_profile(data.y, data.gamma, grid)) {
    out << format_number(mu) << ',' << format_number(ll) << '\n';
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hypothesis tests with noisy proxies for a latent treatment indicator."};
  app.name("nproxy");
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_path;
  Flags flags;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--out", out_path, "write results here instead of stdout");
  flags.add(&app, "--seed", "seed", "root seed for all randomness");
  flags.add(&app, "--threads", "threads", "worker threads for the simulate commands");

  std::string input;
  auto* generate = app.add_subcommand("generate", "simulate one dataset and write it as CSV");
  flags.add(generate, kModelFlags);
  flags.add(generate, "--em-search-bound", "em.search_bound", "bound K on |mu|");

  auto* test = app.add_subcommand("test", "run tests on a dataset CSV");
  test->add_option("input", input, "dataset CSV")->required();
  flags.add(test, kTestFlags);
  flags.add(test, kEmFlags);
  flags.add(test, kBootstrapFlags);

  auto* psi = app.add_subcommand("psi", "estimate psi with a bootstrap upper bound and the adaptive branch");
  psi->add_option("input", input, "dataset CSV with a y_prime column")->required();
  flags.add(psi, kBootstrapFlags);

  auto* profile = app.add_subcommand("loglik-profile", "working log-likelihood on a grid of mu");
  profile->add_option("input", input, "dataset CSV")->required();
  flags.add(profile, kProfileFlags);
  flags.add(profile, "--em-search-bound", "em.search_bound", "bound K on |mu|, default grid [-K, K]");

  auto* power = app.add_subcommand("simulate-power", "rejection rates over a design grid");
  auto* calibration = app.add_subcommand("simulate-calibration", "null rejection rates (mu = 0)");
  auto* agreement = app.add_subcommand("simulate-agreement", "wtd vs wtd+ decision agreement");
  for (CLI::App* sim : {power, calibration, agreement}) {
    flags.add(sim, kModelFlags);
    flags.add(sim, kExperimentFlags);
    flags.add(sim, kTestFlags);
    flags.add(sim, kEmFlags);
    flags.add(sim, kBootstrapFlags);
  }

  std::vector<const char*> argv{"nproxy"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitValidation;
  }

  try {
    Settings settings;
    if (!config_path.empty()) settings.load_file(config_path);
    flags.apply(settings);

    std::ostringstream buffer;
    if (generate->parsed()) {
      cmd_generate(settings, buffer);
    } else if (test->parsed()) {
      cmd_test(settings, input, buffer);
    } else if (psi->parsed()) {
      cmd_psi(settings, input, buffer);
    } else if (profile->parsed()) {
      cmd_profile(settings, input, buffer);
    } else if (power->parsed()) {
      const ExperimentConfig config = experiment_config(settings);
      if (std::none_of(config.mu_grid.begin(), config.mu_grid.end(), [](double m) { return m > 0.0; })) {
        settings.fail("mu", "power needs at least one mu > 0");
      }
      write_result_csv(buffer, run_power_experiment(config));
    } else if (calibration->parsed()) {
      write_result_csv(buffer, run_calibration_experiment(experiment_config(settings)));
    } else if (agreement->parsed()) {
      write_agreement_csv(buffer, run_agreement_experiment(experiment_config(settings)));
    }

    if (out_path.empty()) {
      out << buffer.str();
      out.flush();
    } else {
      std::ofstream file(out_path, std::ios::binary);
      if (!file || !(file << buffer.str()) || !file.flush()) {
        throw std::runtime_error("cannot write output file '" + out_path + "'");
      }
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "nproxy: invalid setting: " << e.what() << '\n';
    return kExitValidation;
  } catch (const InputError& e) {
    err << "nproxy: malformed input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::domain_error& e) {
    err << "nproxy: invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    err << "nproxy: invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "nproxy: error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace nproxy::cli
