#pragma once

// CLI subcommand entry points. Each command owns its output directory
// exclusively (lock file, refuses non-empty targets) and writes a
// manifest sufficient to re-execute it bit-identically.

#include <string>
#include <vector>

namespace seqforge::cli {

int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

}  // namespace seqforge::cli
