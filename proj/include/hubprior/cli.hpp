#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hubprior {

/// Entry point of the `hubprior` command. Returns the process exit status:
/// 0 success, 1 usage, 2 data, 3 internal. Errors are reported on `err` as
/// one JSON object per line; outputs written by a failing command are
/// removed.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

} // namespace hubprior
