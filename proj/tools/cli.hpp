#pragma once

#include <iosfwd>

namespace admd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Entry point of the `admd` tool. Diagnostics go to `err`.
int run(int argc, char** argv);
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace admd::cli
