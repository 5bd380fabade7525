#pragma once

#include <string>
#include <vector>

namespace crel::cli {

enum Exit { ok = 0, violation = 1, usage = 2, budget = 3 };

// args excludes the program name; stdout/stderr are written directly
int run_cli(const std::vector<std::string>& args);

}  // namespace crel::cli
