#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace coxsel {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_numerical = 3;

/// Entry point of the `coxsel` tool; args exclude the program name.
/// Subcommands: fit, simulate, subsample.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses a flat `key = value` file ('#' starts a comment) into
/// `--key=value` tokens. ConfigError on a malformed line.
std::vector<std::pair<std::string, std::string>> read_flat_config(const std::string& path);

}  // namespace coxsel
