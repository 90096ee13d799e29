#pragma once

#include <string>
#include <vector>

namespace croc::cli {

// Exit codes: 0 success, 2 usage/input error, 3 model/data mismatch,
// 4 simulation failure.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args); // args without argv[0]

} // namespace croc::cli
