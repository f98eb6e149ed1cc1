#pragma once

namespace dronefleet {

// Entry point of the dronefleet command-line tool. Exit codes: 0 success,
// 1 usage/parse/validation failure, 2 runtime failure (divergence, table
// budget).
int run_cli(int argc, const char* const* argv);

}  // namespace dronefleet
