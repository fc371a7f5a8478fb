#include "pvgame/errors.hpp"

namespace pvgame {

namespace {

std::string join(const std::vector<std::string>& lines)
{
    std::string out;
    for (const auto& l : lines) {
        if (!out.empty())
            out += "; ";
        out += l;
    }
    return out;
}

} // namespace

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message)
    , line_(line)
    , column_(column)
{
}

ValidationError::ValidationError(std::vector<std::string> diagnostics)
    : Error(join(diagnostics))
    , diagnostics_(std::move(diagnostics))
{
}

ValidationError::ValidationError(const std::string& path, const std::string& message)
    : ValidationError(std::vector<std::string>{path + ": " + message})
{
}

} // namespace pvgame
