#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fwtriage::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int incomplete = 2;
inline constexpr int divergent = 3;
inline constexpr int usage = 64;
inline constexpr int internal = 70;
}  // namespace exit_code

/// Environment variable naming the default corpus store directory.
inline constexpr const char* store_env = "FWTRIAGE_STORE";

/// Runs one invocation; args excludes the program name. Machine output goes
/// to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fwtriage::cli
