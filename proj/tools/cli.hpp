#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rhoflow/errors.hpp"

namespace rhoflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;
inline constexpr int kExitIo = 5;

int exit_code(ErrorCategory category) noexcept;

/// Runs the command line `args` (without the program name). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rhoflow::cli
