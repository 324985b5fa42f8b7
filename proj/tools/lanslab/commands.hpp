#pragma once

#include <iosfwd>

#include "settings.hpp"

namespace lanslab::cli {

// Smallest grid the checks accept; below it results are inconclusive.
inline constexpr int kMinResolvedN = 32;

ExitCode cmd_verify(const Settings& s, std::ostream& out);
ExitCode cmd_solve(const Settings& s, std::ostream& out);
ExitCode cmd_pipeline(const Settings& s, std::ostream& out);
ExitCode cmd_sweep(const Settings& s, std::ostream& out);

// Full entry point: parse, dispatch, map errors to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lanslab::cli
