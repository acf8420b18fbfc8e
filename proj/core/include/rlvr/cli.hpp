#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rlvr {

// Bad flags, bad flag values, or inconsistent flag combinations.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;         // operational error
inline constexpr int kExitUsage = 2;           // configuration / usage error
inline constexpr int kExitDigestMismatch = 3;  // artifact drifted from its manifest

// Entry point shared by the binary and in-process tests. `args` excludes the
// program name. Returns one of the exit codes above; never throws.
int run_cli(const std::vector<std::string>& args);

}  // namespace rlvr
