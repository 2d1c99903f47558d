#pragma once

#include <string>
#include <vector>

namespace vawt {

// Exit codes: 0 success, 1 usage/parse/config error, 2 runtime/oracle error.
int run_cli(const std::vector<std::string>& args);

}  // namespace vawt
