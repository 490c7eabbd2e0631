#pragma once

#include <iosfwd>

namespace bsrnn {

// Entry point of the `bsrnn` command-line tool. Exit codes: 0 success,
// 1 runtime error (one diagnostic line on `err`), 2 usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bsrnn
