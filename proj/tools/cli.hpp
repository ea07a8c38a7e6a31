#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nnfit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;

// Runs one command line (without the program name). Subcommands:
// critvals, test, power, sample, plot, tables.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nnfit::cli
