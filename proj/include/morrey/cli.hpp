#pragma once

namespace morrey {

// Entry point of the `morrey` tool. Exit codes: 0 success, 1 failed
// verification checks, 2 configuration error, 3 validation error,
// 4 solver non-convergence.
int run_cli(int argc, const char* const* argv);

}  // namespace morrey
