#pragma once

namespace asearch {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;  // bad flags or an invalid scenario

// Entry point for the `asearch` tool: run | sweep | bench | validate.
int run_cli(int argc, char** argv);

}  // namespace asearch
