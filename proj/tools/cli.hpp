#ifndef SPARSEVER_TOOLS_CLI_HPP_
#define SPARSEVER_TOOLS_CLI_HPP_

#include <iosfwd>

namespace sparsever::cli {

// Runs one command line. Human-readable output goes to `out`, diagnostics to
// `err`; the return value is the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sparsever::cli

#endif  // SPARSEVER_TOOLS_CLI_HPP_
