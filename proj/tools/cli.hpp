#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lagctrl::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigOrIo = 1,
  kDegenerateGram = 2,
  kDiverged = 3,
  kAmplitudeTooLarge = 4,
  kChecksFailed = 5,
};

/// Full command line including the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lagctrl::cli
