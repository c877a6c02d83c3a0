/**
 * @file cli.hpp
 * @brief The impliedcorr command-line tool.
 *
 * Exit codes: 0 success, 1 validation or usage error, 2 non-convergence,
 * 3 I/O error.
 */

#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace icorr {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitConvergence = 2;
inline constexpr int kExitIo = 3;

int cli_dispatch(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr);

/// Convenience overload; args excludes the program name.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr);

}  // namespace icorr
