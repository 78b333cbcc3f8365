#include "nproxy/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "nproxy/dataset_io.hpp"
#include "nproxy/tests_core.hpp"

namespace nproxy {

namespace {

struct Cell {
  const ProxySpec* proxy;
  double phi;
  std::size_t n;
  double mu_grid_value;
  double mu;  // effect size actually simulated
  double mu_prime;
};

constexpr unsigned bit(TestKind kind) { return 1u << static_cast<unsigned>(kind); }

std::vector<Cell> enumerate_cells(const ExperimentConfig& config, const std::vector<double>& mu_grid) {
  std::vector<Cell> cells;
  for (const ProxySpec& proxy : config.proxy_specs) {
    for (double phi : config.phi_grid) {
      for (std::size_t n : config.n_grid) {
        for (double m : mu_grid) {
          const double mu = config.effect_scale == EffectScale::local ? m / std::sqrt(static_cast<double>(n)) : m;
          cells.push_back({&proxy, phi, n, m, mu, config.mu_prime_rule.resolve(phi, n)});
        }
      }
    }
  }
  return cells;
}

// One rep of one cell: bitmask of rejecting tests.
unsigned run_rep(const ExperimentConfig& config, const Cell& cell, unsigned wanted, std::size_t cell_index,
                 std::size_t rep) {
  const RngStream rep_stream(config.root_seed, {static_cast<std::uint64_t>(cell_index), static_cast<std::uint64_t>(rep)});
  RngStream data_rng = rep_stream.child(0);

  ModelParams params;
  params.mu = cell.mu;
  params.phi = cell.phi;
  params.mu_prime = cell.mu_prime;
  params.proxy = *cell.proxy;
  params.bound = config.em.search_bound;
  const Dataset data = generate_dataset(params, cell.n, data_rng);

  const bool adaptive = (wanted & (bit(TestKind::a_wtd) | bit(TestKind::a_wtd_plus))) != 0;
  std::optional<Branch> branch;
  if (adaptive) {
    BootstrapConfig boot = config.bootstrap;
    boot.rng = rep_stream.child(1);
    branch = select_branch(bootstrap_upper_bound(data.gamma, *data.y_prime, boot).value);
  }

  const bool need_naive = (wanted & bit(TestKind::naive)) || (branch == Branch::naive);
  const bool need_wtd = (wanted & bit(TestKind::wtd)) ||
                        ((wanted & bit(TestKind::a_wtd)) && branch == Branch::weighted);
  const bool need_wtd_plus = (wanted & bit(TestKind::wtd_plus)) ||
                             ((wanted & bit(TestKind::a_wtd_plus)) && branch == Branch::weighted);

  const bool naive = need_naive && naive_test(data.y, config.alpha).reject;
  const bool wtd = need_wtd && weighted_test(data.y, data.gamma, config.alpha).reject;
  const bool wtd_plus = need_wtd_plus && wtd_plus_test(data.y, data.gamma, config.alpha, config.em).reject;

  unsigned mask = 0;
  if (naive) mask |= bit(TestKind::naive);
  if (wtd) mask |= bit(TestKind::wtd);
  if (wtd_plus) mask |= bit(TestKind::wtd_plus);
  if (branch) {
    const bool use_naive = *branch == Branch::naive;
    if (use_naive ? naive : wtd) mask |= bit(TestKind::a_wtd);
    if (use_naive ? naive : wtd_plus) mask |= bit(TestKind::a_wtd_plus);
  }
  return mask & wanted;
}

// Decision masks indexed [cell * reps + rep]. Work is split into contiguous
// chunks pulled from an atomic counter; every slot is written exactly once,
// so the result is independent of the thread count.
std::vector<unsigned char> simulate(const ExperimentConfig& config, const std::vector<Cell>& cells, unsigned wanted) {
  const std::size_t total = cells.size() * config.reps;
  std::vector<unsigned char> masks(total, 0);
  constexpr std::size_t kChunk = 64;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    try {
      for (;;) {
        const std::size_t begin = next.fetch_add(kChunk);
        if (begin >= total) return;
        const std::size_t end = std::min(total, begin + kChunk);
        for (std::size_t k = begin; k < end; ++k) {
          const std::size_t cell = k / config.reps;
          const std::size_t rep = k % config.reps;
          masks[k] = static_cast<unsigned char>(run_rep(config, cells[cell], wanted, cell, rep));
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(total);
    }
  };

  const unsigned threads = std::max(1u, config.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return masks;
}

unsigned wanted_mask(const std::vector<TestKind>& tests) {
  unsigned mask = 0;
  for (TestKind t : tests) mask |= bit(t);
  return mask;
}

std::optional<double> theory_power(const ExperimentConfig& config, const Cell& cell, TestKind kind) {
  if (kind != TestKind::naive && kind != TestKind::wtd) return std::nullopt;
  const double h = cell.mu * std::sqrt(static_cast<double>(cell.n));
  if (!(h >= 0.0)) return std::nullopt;
  if (kind == TestKind::naive) return asymptotic_power_naive(h, cell.phi, config.alpha);
  try {
    const double psi = pitman_efficiency(*cell.proxy, cell.phi).psi;
    return asymptotic_power_weighted(h, cell.phi, psi, config.alpha);
  } catch (const std::domain_error&) {
    return std::nullopt;  // constant proxies have no finite efficiency
  }
}

std::vector<ResultRow> tabulate(const ExperimentConfig& config, const std::vector<double>& mu_grid) {
  config.validate();
  const std::vector<Cell> cells = enumerate_cells(config, mu_grid);
  for (const Cell& cell : cells) {
    if (std::abs(cell.mu) > config.em.search_bound) {
      throw std::domain_error("effect size " + format_number(cell.mu) + " exceeds the parameter bound K");
    }
  }
  const auto masks = simulate(config, cells, wanted_mask(config.tests));

  std::vector<ResultRow> rows;
  rows.reserve(cells.size() * config.tests.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Cell& cell = cells[c];
    for (TestKind kind : config.tests) {
      std::size_t rejections = 0;
      for (std::size_t r = 0; r < config.reps; ++r) rejections += (masks[c * config.reps + r] & bit(kind)) ? 1 : 0;
      ResultRow row;
      row.proxy_label = cell.proxy->label;
      row.a = cell.proxy->a;
      row.b = cell.proxy->b;
      row.phi = cell.phi;
      row.n = cell.n;
      row.mu = cell.mu;
      row.test_name = std::string(to_string(kind));
      row.reps = config.reps;
      row.reject_rate = static_cast<double>(rejections) / static_cast<double>(config.reps);
      row.mc_se = binomial_mc_se(row.reject_rate, config.reps);
      row.alpha = config.alpha;
      row.theory_power = theory_power(config, cell, kind);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string optional_number(const std::optional<double>& x) { return x ? format_number(*x) : std::string(); }

}  // namespace

std::string_view to_string(TestKind kind) noexcept {
  switch (kind) {
    case TestKind::naive: return "naive";
    case TestKind::wtd: return "wtd";
    case TestKind::wtd_plus: return "wtd+";
    case TestKind::a_wtd: return "a_wtd";
    case TestKind::a_wtd_plus: return "a_wtd+";
  }
  return "";
}

TestKind parse_test_kind(std::string_view text) {
  for (TestKind kind : all_test_kinds()) {
    if (to_string(kind) == text) return kind;
  }
  throw std::invalid_argument("unknown test '" + std::string(text) + "' (expected naive, wtd, wtd+, a_wtd, a_wtd+)");
}

std::vector<TestKind> all_test_kinds() {
  return {TestKind::naive, TestKind::wtd, TestKind::wtd_plus, TestKind::a_wtd, TestKind::a_wtd_plus};
}

double MuPrimeRule::resolve(double phi, std::size_t n) const {
  if (kind == Kind::fixed) return value;
  return value / (phi * std::sqrt(static_cast<double>(n)));
}

void ExperimentConfig::validate() const {
  if (proxy_specs.empty()) throw std::domain_error("experiment needs at least one proxy regime");
  if (phi_grid.empty()) throw std::domain_error("experiment needs a non-empty phi grid");
  if (n_grid.empty()) throw std::domain_error("experiment needs a non-empty n grid");
  if (mu_grid.empty()) throw std::domain_error("experiment needs a non-empty mu grid");
  if (tests.empty()) throw std::domain_error("experiment needs at least one test");
  if (reps < 1) throw std::domain_error("experiment needs reps >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in (0, 1)");
  if (!(mu_prime_rule.value != 0.0 && std::isfinite(mu_prime_rule.value))) {
    throw std::domain_error("positive-control shift must be finite and nonzero");
  }
  for (const auto& spec : proxy_specs) spec.validate();
  for (double phi : phi_grid) {
    if (!(phi > 0.0 && phi <= 1.0)) throw std::domain_error("phi values must lie in (0, 1]");
  }
  for (std::size_t n : n_grid) {
    if (n < 1) throw std::domain_error("sample sizes must be >= 1");
  }
  for (double mu : mu_grid) {
    if (!std::isfinite(mu)) throw std::domain_error("mu values must be finite");
  }
  em.validate();
  const bool adaptive = std::any_of(tests.begin(), tests.end(), [](TestKind t) {
    return t == TestKind::a_wtd || t == TestKind::a_wtd_plus;
  });
  if (adaptive) bootstrap.validate();
}

double binomial_mc_se(double rate, std::size_t reps) {
  return std::sqrt(rate * (1.0 - rate) / static_cast<double>(reps));
}

PowerTable run_power_experiment(const ExperimentConfig& config) {
  config.validate();
  if (std::none_of(config.mu_grid.begin(), config.mu_grid.end(), [](double m) { return m > 0.0; })) {
    throw std::domain_error("power experiment needs at least one mu > 0");
  }
  return tabulate(config, config.mu_grid);
}

CalibrationTable run_calibration_experiment(const ExperimentConfig& config) {
  ExperimentConfig null_config = config;
  null_config.mu_grid = {0.0};
  return tabulate(null_config, null_config.mu_grid);
}

AgreementTable run_agreement_experiment(const ExperimentConfig& config) {
  ExperimentConfig pair = config;
  pair.tests = {TestKind::wtd, TestKind::wtd_plus};
  pair.validate();
  const std::vector<Cell> cells = enumerate_cells(pair, pair.mu_grid);
  for (const Cell& cell : cells) {
    if (std::abs(cell.mu) > pair.em.search_bound) {
      throw std::domain_error("effect size " + format_number(cell.mu) + " exceeds the parameter bound K");
    }
  }
  const auto masks = simulate(pair, cells, wanted_mask(pair.tests));

  AgreementTable rows;
  rows.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Cell& cell = cells[c];
    std::size_t agree = 0;
    for (std::size_t r = 0; r < pair.reps; ++r) {
      const unsigned m = masks[c * pair.reps + r];
      agree += ((m & bit(TestKind::wtd)) != 0) == ((m & bit(TestKind::wtd_plus)) != 0) ? 1 : 0;
    }
    AgreementRow row;
    row.proxy_label = cell.proxy->label;
    row.a = cell.proxy->a;
    row.b = cell.proxy->b;
    row.phi = cell.phi;
    row.n = cell.n;
    row.mu = cell.mu;
    row.reps = pair.reps;
    row.agreement_rate = static_cast<double>(agree) / static_cast<double>(pair.reps);
    row.mc_se = binomial_mc_se(row.agreement_rate, pair.reps);
    row.alpha = pair.alpha;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_result_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.proxy_label << ',' << format_number(r.a) << ',' << format_number(r.b) << ',' << format_number(r.phi)
        << ',' << r.n << ',' << format_number(r.mu) << ',' << r.test_name << ',' << format_number(r.reject_rate)
        << ',' << format_number(r.mc_se) << ',' << r.reps << ',' << format_number(r.alpha) << ','
        << optional_number(r.theory_power) << '\n';
  }
}

void write_agreement_csv(std::ostream& out, const AgreementTable& rows) {
  out << kAgreementCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.proxy_label << ',' << format_number(r.a) << ',' << format_number(r.b) << ',' << format_number(r.phi)
        << ',' << r.n << ',' << format_number(r.mu) << ',' << format_number(r.agreement_rate) << ','
        << format_number(r.mc_se) << ',' << r.reps << ',' << format_number(r.alpha) << '\n';
  }
}

}  // namespace nproxy
