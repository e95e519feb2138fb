#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace selfs {

/// Exit codes: 0 success, 1 validation/argument/I/O failure, 2 numeric failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumeric = 2;

/// Runs the command-line front end in-process. argv[0] is the program name.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace selfs
