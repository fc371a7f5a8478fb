#pragma once

#include <iosfwd>

namespace pvgame {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int validation = 1;
inline constexpr int invariant = 2;
inline constexpr int usage = 64;
} // namespace exit_code

/// Command-line driver: validate, build, solve, oracle, pipeline-check.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace pvgame
