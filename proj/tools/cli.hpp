#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sns::cli {

enum ExitCode { kOk = 0, kUsage = 1, kNotConverged = 2 };

/// Parses argv and runs one of solve | mc | sweep | verify. Summaries go to
/// `out` as key=value lines, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sns::cli
