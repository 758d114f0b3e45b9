// Command-line front end. Kept in a library so tests can drive it.
#pragma once

#include <ostream>

namespace satqkd::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConfig = 2,
  kRuntime = 3,
};

/// Runs one invocation. CSV goes to `out` unless --out names a file;
/// diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace satqkd::cli
