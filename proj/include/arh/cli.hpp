#pragma once

#include <string>
#include <vector>

namespace arh {

/// Entry point for the arh1 command-line tool. `args` excludes the program
/// name. Exit codes: 0 success, 1 usage error, 2 data/model error,
/// 3 study acceptance-check failure.
int run_cli(const std::vector<std::string>& args);

}  // namespace arh
