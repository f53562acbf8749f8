#pragma once

#include <string>
#include <vector>

namespace bmr {

// Dispatches `simulate`, `fit` and `summarize`. Args exclude the program
// name. Returns the process exit code; errors print one line to stderr.
int run_command(const std::vector<std::string>& args);

}  // namespace bmr
