#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace reworkbench {

/// Input data could not be parsed. `line()` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& message, std::size_t line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Invalid configuration, flag value, or parameter combination.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Transport or protocol failure while talking to a chat-completion provider.
class GatewayError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace reworkbench
