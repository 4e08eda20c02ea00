#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mgc {

inline constexpr const char* kVersion = "0.9.0";

/// Runs one command line (args excludes the program name). Exit codes:
/// 0 success, 1 a library error, 2 a usage error.
int cli_execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mgc
