#pragma once

#include <iosfwd>

namespace multifrac::cli {

/// Entry point of the multifrac tool. Exit codes: 0 success, 1 I/O failure,
/// 2 invalid input (config, IFS, budget), 3 numerical failure. Failures
/// print one line "multifrac: error kind=<kind> reason=<text>" to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace multifrac::cli
