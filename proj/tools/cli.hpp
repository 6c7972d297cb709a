#pragma once

#include <iosfwd>

namespace dirac {

// Parses argv, runs one subcommand, and writes the report JSON to out.
// Exit codes: 0 success, 2 parse (bad flags, bad config, bad descriptors),
// 3 precondition violations, 4 numerical failures.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace dirac
