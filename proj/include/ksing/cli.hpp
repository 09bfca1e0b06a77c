#pragma once

namespace ksing {

// Full command-line surface; returns the process exit code:
//   0 success, 1 unusable invocation or config, 2 domain/precondition
//   failure, 3 convergence failure.
int run_cli(int argc, const char* const* argv);

}  // namespace ksing
