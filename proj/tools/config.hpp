#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nproxy/adaptive.hpp"
#include "nproxy/harness.hpp"
#include "nproxy/model.hpp"
#include "nproxy/working_mle.hpp"

namespace nproxy::cli {

/// A rejected setting. `origin` is "file:line" or the command-line flag.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, std::string origin, const std::string& what);
  [[nodiscard]] const std::string& key() const noexcept { return key_; }
  [[nodiscard]] const std::string& origin() const noexcept { return origin_; }

 private:
  std::string key_;
  std::string origin_;
};

/// Every key accepted in a config file, in documentation order.
const std::vector<std::string_view>& known_keys();

struct Setting {
  std::string value;
  std::string origin;
};

/// key = value settings. Later sources override earlier ones.
class Settings {
 public:
  /// Parses `key = value` lines; '#' starts a comment. Unknown and
  /// repeated keys are rejected.
  void load(std::istream& in, const std::string& source);
  void load_file(const std::string& path);
  /// Command-line override; `flag` is reported as the origin.
  void set(const std::string& key, std::string value, std::string flag);

  [[nodiscard]] bool has(std::string_view key) const;
  [[nodiscard]] const Setting* find(std::string_view key) const;

  [[nodiscard]] std::optional<double> number(std::string_view key) const;
  [[nodiscard]] std::optional<std::uint64_t> count(std::string_view key) const;
  [[nodiscard]] std::optional<std::string> text(std::string_view key) const;
  [[nodiscard]] std::vector<double> numbers(std::string_view key) const;
  [[nodiscard]] std::vector<std::string> words(std::string_view key) const;

  [[noreturn]] void fail(std::string_view key, const std::string& what) const;

 private:
  std::map<std::string, Setting, std::less<>> values_;
};

/// Parses one proxy token: a regime label, const:<c> or beta:<a>:<b>.
ProxySpec parse_proxy(std::string_view token);

ExperimentConfig experiment_config(const Settings& s);
/// Single-dataset parameters for `generate`.
ModelParams model_params(const Settings& s);
std::size_t sample_size(const Settings& s);
EmConfig em_config(const Settings& s);
BootstrapConfig bootstrap_config(const Settings& s);
ProfileGrid profile_grid(const Settings& s);
std::vector<TestKind> test_kinds(const Settings& s, bool have_y_prime);
double level(const Settings& s);
std::uint64_t seed(const Settings& s);
unsigned thread_count(const Settings& s);

}  // namespace nproxy::cli
