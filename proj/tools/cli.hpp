#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rpm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;

// args excludes the program name. Subcommands: stats, synth, featurize,
// train, evaluate, compare.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace rpm::cli
