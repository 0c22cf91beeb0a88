#pragma once

#include <string>
#include <vector>

namespace utilisvm::cli {

/// Runs one CLI invocation (args exclude the program name).
/// Exit status: 0 success, 1 input/parse errors, 2 numeric/convergence
/// failures.
int run(const std::vector<std::string>& args);

}  // namespace utilisvm::cli
