#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace decolog {

// Exit codes: 0 success, 1 a check or verification failed, 2 usage, parse or
// type error. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace decolog
