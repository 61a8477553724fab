#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace povgini {

/// Runs the command line `args` (args[0] is the program name). Results go to
/// `out` only on success; diagnostics go to `err`. Returns the exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace povgini
