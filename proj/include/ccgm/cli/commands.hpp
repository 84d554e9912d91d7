#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace ccgm::cli {

// Runs one command; `args` excludes the program name. Returns the exit code:
// 0 success, 2 usage, 3 I/O, 4 numeric failure.
int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr);

}  // namespace ccgm::cli
