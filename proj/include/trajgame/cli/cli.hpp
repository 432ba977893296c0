#pragma once

namespace trajgame {

// Entry point of the `trajgame` binary, separated for in-process testing.
// Exit codes: 0 success, 2 user/input error, 3 numerical/solver error.
int run_cli(int argc, const char* const* argv);

}  // namespace trajgame
