#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qwatch::cli {

enum ExitCode : int {
  kOk = 0,
  kRejected = 1,  // validation findings or inconsistent selection
  kUsage = 2,
  kIo = 3,        // unreadable file, malformed document, interrupted input
};

/// Entry point behind the `qwatch` binary. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace qwatch::cli
