#ifndef PRONYKIT_CLI_HPP
#define PRONYKIT_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace pronykit
{

/// Exit codes of the command-line front end.
enum ExitCode : int
{
    kExitOk = 0,
    kExitInvalid = 1,
    kExitUnsolvable = 2,
    kExitNumerical = 3,
};

/// Runs one CLI invocation. `args` excludes the program name. Results go to
/// --output or `out`; errors go to `err` as a JSON object.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace pronykit

#endif
