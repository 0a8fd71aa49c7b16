// cli.hpp - experiment runner behind the csm executable.

#pragma once

#include <ostream>

namespace csm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitTolerance = 2;

/// Parses argv (argv[0] is the program name) and runs one subcommand. CSV goes
/// to `out` unless --out names a file; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace csm::cli
