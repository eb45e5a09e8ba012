#pragma once

#include <ostream>

namespace gnnsteal::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;
inline constexpr int kExitBudget = 4;

/// Entry point of the gnnsteal tool. Never throws; failures map to the exit codes above with
/// a message on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Makes a running `serve` command return (also triggered by SIGINT/SIGTERM).
void request_stop();

}  // namespace gnnsteal::cli
