#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace herdscope::cli {

enum ExitCode : int { ok = 0, usage = 1, validation = 2, compute = 3 };

/// Runs the herdscope command line. `args` excludes the program name.
/// Diagnostics go to `err` as one line; tables and summaries to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string version();

}  // namespace herdscope::cli
