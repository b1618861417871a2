#pragma once

// Command-line front end:
//   rgt solve SESSION [--json] [--bound N] [-o FILE]
//   rgt run SCENARIO [--json] [--bound N] [--trace] [-o FILE]
//   rgt check GRAPH
//   rgt export-dot GRAPH [-o FILE]
//   rgt serve [--host H] [--port P] [--snapshot-dir DIR]
//
// Errors print one line "error[Code]: message" on stderr.

#include <ostream>

#include "rgt/error.hpp"

namespace rgt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNotDecomposable = 3;
inline constexpr int kExitGuardExceeded = 4;

int exit_code_for(ErrorCode code) noexcept;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rgt::cli
