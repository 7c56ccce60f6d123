#pragma once

#include <string>
#include <vector>

namespace hofer::cli {

enum ExitCode { Pass = 0, RuntimeFailure = 1, Violation = 2 };

int run(int argc, const char* const* argv);
// args excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace hofer::cli
