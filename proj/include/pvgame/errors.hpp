#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pvgame {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Syntax error in the textual process grammar; carries a 1-based position.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column);

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Runtime failure of the operational semantics (unknown identifier, open
/// guard, unguarded recursion, ...).
class SemanticError : public Error {
public:
    using Error::Error;
};

/// Input data violates a documented invariant. Holds one diagnostic per
/// offending field, each prefixed by its path.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> diagnostics);
    ValidationError(const std::string& path, const std::string& message);

    const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<std::string> diagnostics_;
};

/// An internal consistency check failed: a bug, or a property that the
/// algorithms rely on does not hold for this input.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

/// A configured size cap was exceeded.
class CapExceeded : public Error {
public:
    using Error::Error;
};

} // namespace pvgame
