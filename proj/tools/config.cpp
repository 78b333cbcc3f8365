#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <utility>

namespace nproxy::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::optional<double> to_double(std::string_view token) {
  const char* first = token.data();
  const char* last = first + token.size();
  if (first != last && *first == '+') ++first;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last) return std::nullopt;
  return value;
}

std::optional<std::uint64_t> to_count(std::string_view token) {
  std::uint64_t value = 0;
  const char* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), last, value);
  if (ec != std::errc{} || ptr != last || token.empty()) return std::nullopt;
  return value;
}

// "lo:step:hi" expands to lo, lo + step, ..., hi (inclusive, within rounding).
std::optional<std::vector<double>> expand_range(std::string_view token) {
  const auto parts = split(token, ':');
  if (parts.size() != 3) return std::nullopt;
  const auto lo = to_double(parts[0]);
  const auto step = to_double(parts[1]);
  const auto hi = to_double(parts[2]);
  if (!lo || !step || !hi || !(*step > 0.0) || !(*hi >= *lo)) return std::nullopt;
  const double span = (*hi - *lo) / *step;
  if (span > 1e6) return std::nullopt;
  const auto steps = static_cast<std::size_t>(std::floor(span + 1e-9));
  std::vector<double> out;
  out.reserve(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) out.push_back(*lo + static_cast<double>(i) * *step);
  return out;
}

}  // namespace

ConfigError::ConfigError(std::string key, std::string origin, const std::string& what)
    : std::runtime_error(origin + ": " + key + ": " + what), key_(std::move(key)), origin_(std::move(origin)) {}

const std::vector<std::string_view>& known_keys() {
  static const std::vector<std::string_view> keys{
      "proxy",          "a",
      "b",              "phi",
      "n",              "mu",
      "effect_scale",   "mu_prime",
      "mu_prime_delta", "alpha",
      "reps",           "tests",
      "seed",           "threads",
      "em.tol",         "em.max_iter",
      "em.search_bound", "bootstrap.resamples",
      "bootstrap.alpha_prime", "bootstrap.method",
      "profile.lo",     "profile.hi",
      "profile.points",
  };
  return keys;
}

void Settings::load(std::istream& in, const std::string& source) {
  const auto& keys = known_keys();
  std::string raw;
  std::size_t line_no = 0;
  std::map<std::string, std::string, std::less<>> seen;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string origin = source + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(std::string(line), origin, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("", origin, "missing key before '='");
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError(key, origin, "unknown key");
    if (value.empty()) throw ConfigError(key, origin, "missing value");
    if (const auto it = seen.find(key); it != seen.end()) {
      throw ConfigError(key, origin, "repeated key (first set at " + it->second + ")");
    }
    seen.emplace(key, origin);
    values_[key] = Setting{value, origin};
  }
}

void Settings::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  load(in, path);
}

void Settings::set(const std::string& key, std::string value, std::string flag) {
  values_[key] = Setting{std::move(value), std::move(flag)};
}

bool Settings::has(std::string_view key) const { return values_.find(key) != values_.end(); }

const Setting* Settings::find(std::string_view key) const {
  const auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

void Settings::fail(std::string_view key, const std::string& what) const {
  const Setting* s = find(key);
  throw ConfigError(std::string(key), s ? s->origin : "settings", what);
}

std::optional<double> Settings::number(std::string_view key) const {
  const Setting* s = find(key);
  if (!s) return std::nullopt;
  const auto v = to_double(s->value);
  if (!v || !std::isfinite(*v)) fail(key, "'" + s->value + "' is not a finite number");
  return v;
}

std::optional<std::uint64_t> Settings::count(std::string_view key) const {
  const Setting* s = find(key);
  if (!s) return std::nullopt;
  const auto v = to_count(s->value);
  if (!v) fail(key, "'" + s->value + "' is not a non-negative integer");
  return v;
}

std::optional<std::string> Settings::text(std::string_view key) const {
  const Setting* s = find(key);
  if (!s) return std::nullopt;
  return s->value;
}

std::vector<double> Settings::numbers(std::string_view key) const {
  const Setting* s = find(key);
  if (!s) return {};
  std::vector<double> out;
  for (const auto token : split(s->value, ',')) {
    if (token.find(':') != std::string_view::npos) {
      const auto range = expand_range(token);
      if (!range) fail(key, "'" + std::string(token) + "' is not a range lo:step:hi with step > 0 and hi >= lo");
      out.insert(out.end(), range->begin(), range->end());
      continue;
    }
    const auto v = to_double(token);
    if (!v || !std::isfinite(*v)) fail(key, "'" + std::string(token) + "' is not a finite number");
    out.push_back(*v);
  }
  return out;
}

std::vector<std::string> Settings::words(std::string_view key) const {
  const Setting* s = find(key);
  if (!s) return {};
  std::vector<std::string> out;
  for (const auto token : split(s->value, ',')) {
    if (token.empty()) fail(key, "empty list entry");
    out.emplace_back(token);
  }
  return out;
}

ProxySpec parse_proxy(std::string_view token) {
  const auto parts = split(token, ':');
  if (parts.size() == 2 && parts[0] == "const") {
    const auto c = to_double(parts[1]);
    if (!c) throw std::invalid_argument("const:<c> needs a number");
    return ProxySpec::constant_gamma(*c);
  }
  if (parts.size() == 3 && parts[0] == "beta") {
    const auto a = to_double(parts[1]);
    const auto b = to_double(parts[2]);
    if (!a || !b) throw std::invalid_argument("beta:<a>:<b> needs two numbers");
    ProxySpec spec;
    spec.a = *a;
    spec.b = *b;
    spec.label = "custom";
    spec.validate();
    return spec;
  }
  return ProxySpec::from_label(token);
}

namespace {

std::vector<ProxySpec> proxies(const Settings& s, bool single) {
  std::vector<ProxySpec> specs;
  if (s.has("proxy")) {
    for (const auto& token : s.words("proxy")) {
      try {
        specs.push_back(parse_proxy(token));
      } catch (const std::exception& e) {
        s.fail("proxy", "'" + token + "': " + e.what());
      }
    }
  } else if (s.has("a") || s.has("b")) {
    specs.push_back(ProxySpec{0.0, 0.0, "custom", std::nullopt});
  } else if (single) {
    s.fail("proxy", "required (a regime label, const:<c> or beta:<a>:<b>)");
  } else {
    const auto all = standard_proxy_regimes();
    specs.assign(all.begin(), all.end());
  }
  if (single && specs.size() != 1) s.fail("proxy", "exactly one proxy regime expected");

  for (const char* key : {"a", "b"}) {
    if (!s.has(key)) continue;
    if (specs.size() != 1) s.fail(key, "override needs exactly one proxy regime");
    if (specs.front().constant) s.fail(key, "cannot override a constant proxy");
    const double v = *s.number(key);
    (key[0] == 'a' ? specs.front().a : specs.front().b) = v;
    specs.front().label = "custom";
    try {
      specs.front().validate();
    } catch (const std::exception& e) {
      s.fail(key, e.what());
    }
  }
  return specs;
}

std::vector<double> phis(const Settings& s) {
  std::vector<double> out = s.numbers("phi");
  if (out.empty()) s.fail("phi", "required");
  for (double phi : out) {
    if (!(phi > 0.0 && phi <= 1.0)) s.fail("phi", "values must lie in (0, 1]");
  }
  return out;
}

std::vector<std::size_t> sizes(const Settings& s) {
  std::vector<std::size_t> out;
  for (double v : s.numbers("n")) {
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e9) s.fail("n", "values must be positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) s.fail("n", "required");
  return out;
}

double search_bound(const Settings& s) {
  const double k = s.number("em.search_bound").value_or(kDefaultMuBound);
  if (!(k > 0.0)) s.fail("em.search_bound", "must be > 0");
  return k;
}

}  // namespace

double level(const Settings& s) {
  const double alpha = s.number("alpha").value_or(1e-4);
  if (!(alpha > 0.0 && alpha < 1.0)) s.fail("alpha", "must lie in (0, 1)");
  return alpha;
}

std::uint64_t seed(const Settings& s) { return s.count("seed").value_or(0); }

unsigned thread_count(const Settings& s) {
  const std::uint64_t t = s.count("threads").value_or(1);
  if (t < 1 || t > 1024) s.fail("threads", "must lie in [1, 1024]");
  return static_cast<unsigned>(t);
}

EmConfig em_config(const Settings& s) {
  EmConfig em;
  em.tol = s.number("em.tol").value_or(em.tol);
  if (!(em.tol > 0.0)) s.fail("em.tol", "must be > 0");
  const std::uint64_t iters = s.count("em.max_iter").value_or(static_cast<std::uint64_t>(em.max_iter));
  if (iters < 1 || iters > 1000000) s.fail("em.max_iter", "must lie in [1, 1000000]");
  em.max_iter = static_cast<int>(iters);
  em.search_bound = search_bound(s);
  em.validate();
  return em;
}

BootstrapConfig bootstrap_config(const Settings& s) {
  BootstrapConfig b;
  b.n_resamples = s.count("bootstrap.resamples").value_or(b.n_resamples);
  if (b.n_resamples < 100) s.fail("bootstrap.resamples", "must be >= 100");
  b.alpha_prime = s.number("bootstrap.alpha_prime").value_or(b.alpha_prime);
  if (!(b.alpha_prime > 0.0 && b.alpha_prime < 0.5)) s.fail("bootstrap.alpha_prime", "must lie in (0, 0.5)");
  if (const auto m = s.text("bootstrap.method")) {
    try {
      b.method = parse_bootstrap_method(*m);
    } catch (const std::exception&) {
      s.fail("bootstrap.method", "'" + *m + "' is not basic or percentile");
    }
  }
  b.rng = RngStream(seed(s));
  b.validate();
  return b;
}

ProfileGrid profile_grid(const Settings& s) {
  const double k = search_bound(s);
  ProfileGrid g{-k, k, 2001};
  g.lo = s.number("profile.lo").value_or(g.lo);
  g.hi = s.number("profile.hi").value_or(g.hi);
  if (!(g.hi > g.lo)) s.fail(s.has("profile.hi") ? "profile.hi" : "profile.lo", "need profile.lo < profile.hi");
  const std::uint64_t points = s.count("profile.points").value_or(g.num_points);
  if (points < 2 || points > 10000000) s.fail("profile.points", "must lie in [2, 10000000]");
  g.num_points = static_cast<std::size_t>(points);
  return g;
}

std::vector<TestKind> test_kinds(const Settings& s, bool have_y_prime) {
  if (!s.has("tests")) {
    if (have_y_prime) return all_test_kinds();
    return {TestKind::naive, TestKind::wtd, TestKind::wtd_plus};
  }
  std::vector<TestKind> out;
  for (const auto& token : s.words("tests")) {
    TestKind kind{};
    try {
      kind = parse_test_kind(token);
    } catch (const std::exception&) {
      s.fail("tests", "'" + token + "' is not one of naive, wtd, wtd+, a_wtd, a_wtd+");
    }
    if (std::find(out.begin(), out.end(), kind) != out.end()) s.fail("tests", "'" + token + "' listed twice");
    if (!have_y_prime && (kind == TestKind::a_wtd || kind == TestKind::a_wtd_plus)) {
      s.fail("tests", "'" + token + "' needs a y_prime column");
    }
    out.push_back(kind);
  }
  return out;
}

std::size_t sample_size(const Settings& s) {
  const auto n = sizes(s);
  if (n.size() != 1) s.fail("n", "exactly one value expected");
  return n.front();
}

ModelParams model_params(const Settings& s) {
  ModelParams p;
  p.proxy = proxies(s, true).front();
  const auto phi = phis(s);
  if (phi.size() != 1) s.fail("phi", "exactly one value expected");
  p.phi = phi.front();
  const auto mu = s.numbers("mu");
  if (mu.size() != 1) s.fail("mu", mu.empty() ? "required" : "exactly one value expected");
  p.mu = mu.front();
  p.bound = search_bound(s);
  if (std::abs(p.mu) > p.bound) s.fail("mu", "|mu| exceeds em.search_bound");
  if (s.has("mu_prime") && s.has("mu_prime_delta")) s.fail("mu_prime", "conflicts with mu_prime_delta");
  if (s.has("mu_prime")) {
    p.mu_prime = *s.number("mu_prime");
  } else if (s.has("mu_prime_delta")) {
    p.mu_prime = MuPrimeRule::delta(*s.number("mu_prime_delta")).resolve(p.phi, sample_size(s));
  }
  if (p.mu_prime && std::abs(*p.mu_prime) > p.bound) {
    s.fail(s.has("mu_prime") ? "mu_prime" : "mu_prime_delta", "|mu'| exceeds em.search_bound");
  }
  p.validate();
  return p;
}

ExperimentConfig experiment_config(const Settings& s) {
  ExperimentConfig c;
  c.proxy_specs = proxies(s, false);
  c.phi_grid = phis(s);
  c.n_grid = sizes(s);
  c.mu_grid = s.numbers("mu");
  if (c.mu_grid.empty()) c.mu_grid = {0.0};
  if (const auto scale = s.text("effect_scale")) {
    if (*scale == "absolute") {
      c.effect_scale = EffectScale::absolute;
    } else if (*scale == "local") {
      c.effect_scale = EffectScale::local;
    } else {
      s.fail("effect_scale", "'" + *scale + "' is not absolute or local");
    }
  }
  if (s.has("mu_prime") && s.has("mu_prime_delta")) s.fail("mu_prime", "conflicts with mu_prime_delta");
  if (s.has("mu_prime")) c.mu_prime_rule = MuPrimeRule::fixed(*s.number("mu_prime"));
  if (s.has("mu_prime_delta")) c.mu_prime_rule = MuPrimeRule::delta(*s.number("mu_prime_delta"));
  c.alpha = level(s);
  const std::uint64_t reps = s.count("reps").value_or(c.reps);
  if (reps < 1 || reps > 100000000) s.fail("reps", "must lie in [1, 100000000]");
  c.reps = static_cast<std::size_t>(reps);
  c.tests = test_kinds(s, true);
  c.bootstrap = bootstrap_config(s);
  c.em = em_config(s);
  c.root_seed = seed(s);
  c.threads = thread_count(s);

  for (double mu : c.mu_grid) {
    for (std::size_t n : c.n_grid) {
      const double m = c.effect_scale == EffectScale::local ? mu / std::sqrt(static_cast<double>(n)) : mu;
      if (std::abs(m) > c.em.search_bound) s.fail("mu", "|mu| exceeds em.search_bound for some n");
    }
  }
  for (double phi : c.phi_grid) {
    for (std::size_t n : c.n_grid) {
      if (std::abs(c.mu_prime_rule.resolve(phi, n)) > c.em.search_bound) {
        s.fail(s.has("mu_prime") ? "mu_prime" : "mu_prime_delta", "|mu'| exceeds em.search_bound for some (phi, n)");
      }
    }
  }
  c.validate();
  return c;
}

}  // namespace nproxy::cli
