#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nproxy::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

/// Runs the `nproxy` command line. `args` excludes the program name.
/// Results go to `out` unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nproxy::cli
