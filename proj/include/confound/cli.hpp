#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace confound::cli {

/// Exit codes of the command line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;  // validation and domain errors
inline constexpr int kExitUsage = 2;   // bad arguments, unreadable or malformed input syntax

/// Runs one invocation. `args` excludes the program name. Reports go to `out`
/// (unless --out is given), errors and --verbose summaries to `err`. Errors are
/// a single line starting with "error:".
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Version string embedded in every report.
const char* version();

}  // namespace confound::cli
