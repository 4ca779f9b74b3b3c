#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sqa::cli {

// Runs the command line `args` (program name excluded). Returns the process
// exit code: 0 success, 2 invalid input, 3 runtime or accuracy failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sqa::cli
