#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace payforward::cli {

inline constexpr const char* kVersion = "0.1.0";

// Runs one subcommand. Exit status: 0 success, 1 domain error, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace payforward::cli
