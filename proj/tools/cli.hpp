#ifndef ADASIZE_TOOLS_CLI_HPP
#define ADASIZE_TOOLS_CLI_HPP

#include <iosfwd>

namespace adasize::cli {

/// Exit codes: 0 success, 1 usage error, 2 runtime error.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace adasize::cli

#endif  // ADASIZE_TOOLS_CLI_HPP
