#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace evobench::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kConfigError = 2;
inline constexpr int kRunFailure = 3;
inline constexpr int kValidationFailure = 4;

// args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace evobench::cli
