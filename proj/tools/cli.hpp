#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kmlab::cli {

enum ExitCode : int {
    kSuccess = 0,
    kValidationError = 1,
    kRuntimeError = 2,
    kLemmaViolation = 3,
};

/// Runs one kmlab subcommand. argv[0] is the program name. Errors go to `err`
/// prefixed with "KM-ERR:".
int cli_dispatch(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);
int cli_dispatch(int argc, const char* const* argv);

}  // namespace kmlab::cli
