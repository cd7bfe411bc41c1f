#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace salesmine::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kRemoteError = 3,
};

// Runs one salesmine command line. Documents go to `out` (or --out),
// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace salesmine::cli
