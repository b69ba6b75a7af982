#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace eigdef::cli {

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirVariable = "EIGDEF_OUT_DIR";

/// Runs one subcommand. `args` excludes the program name. Returns 0 on
/// success, 2 for usage errors (usage text goes to `err`), 1 for any other
/// failure after printing a single-line diagnostic.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses `start:stop:count` into count evenly spaced points, endpoints included.
std::vector<double> parse_grid(const std::string& text);

}  // namespace eigdef::cli
