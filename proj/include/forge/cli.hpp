#pragma once

namespace forge::cli {

// Full command-line entry point. Returns the process exit code: 0 success,
// 1 validation/conversion/usage, 2 parse, 3 numerical.
int run(int argc, const char* const* argv);

}  // namespace forge::cli
