#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace iqp::cli {

enum ExitCode : int { found_or_accept = 0, failed_or_reject = 1, io_or_parse_error = 2 };

/// Runs the workbench with argv-style arguments (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace iqp::cli
