#pragma once

#include <string>
#include <vector>

namespace eqa {

/// Runs the command-line interface. Returns 0 on success, 1 on usage errors,
/// 2 on data errors. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args);

} // namespace eqa
