#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace offlens::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

// Runs one subcommand. `args` excludes the program name.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

std::vector<std::string> subcommands();
// "--name" for every option the subcommand accepts (help excluded).
std::vector<std::string> subcommand_flags(const std::string& name);
std::string subcommand_help(const std::string& name);

// Flat key=value config: '#' comments, blank lines ignored, keys are long
// flag names without dashes.
std::vector<std::pair<std::string, std::string>> parse_config(const std::string& text);

}  // namespace offlens::cli
