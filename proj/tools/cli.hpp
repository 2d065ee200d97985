#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace svloss::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 2, // bad flags, I/O failure, shape mismatch
    kEmptyInput = 3,
};

// args excludes the program name. Reports and scalars go to `out`,
// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace svloss::cli
