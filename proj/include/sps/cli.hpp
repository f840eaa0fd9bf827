#ifndef SPS_CLI_HPP
#define SPS_CLI_HPP

#include <iosfwd>

namespace sps {

/// Entry point of the `sps` tool. Subcommands: run, verify, render.
/// Returns 0 on success, 1 when `verify` fails its check, and otherwise the
/// exit code of the error category (2 config, 3 data, 4 numerical, 5 mixing).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sps

#endif
