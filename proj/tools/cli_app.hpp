#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cbx {

/// Exit codes shared by every subcommand.
inline constexpr int exit_ok = 0;
inline constexpr int exit_format = 1;
inline constexpr int exit_singular = 2;
inline constexpr int exit_usage = 64;

/// Run the command-line front end on already-split arguments (no program
/// name). Returns the process exit code; all output goes to the supplied
/// streams so tests can drive the CLI in-process.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cbx
