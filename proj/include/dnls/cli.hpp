#pragma once

#include <string>
#include <vector>

namespace dnls {

// Runs one CLI invocation (args exclude the program name). Exit codes:
// 0 success, 1 numerical failure, 2 usage or configuration error.
int run_cli(const std::vector<std::string>& args);

}  // namespace dnls
