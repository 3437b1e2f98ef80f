#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mincurv {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitValidation = 2, kExitUsage = 64 };

/// Subcommands: run, eps-hull, strategy, graph-g, props, experiment.
int cli_main(int argc, const char* const* argv);
/// Same, with explicit arguments (argv[0] excluded) and streams.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mincurv
