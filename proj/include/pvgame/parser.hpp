#pragma once

#include "pvgame/process.hpp"

#include <string_view>

namespace pvgame {

/// Parses one process term (grammar in docs/grammar.md). Summation
/// invariants are checked; calls are not resolved.
Term parse_process(std::string_view text);

/// As above, and additionally requires every call to resolve in `env`.
Term parse_process(std::string_view text, const DefinitionEnv& env);

/// Parses a sequence of `Name(x, ...) := process;` definitions.
DefinitionEnv parse_definitions(std::string_view text);

ValueExpr parse_value(std::string_view text);
BoolExpr parse_guard(std::string_view text);

} // namespace pvgame
