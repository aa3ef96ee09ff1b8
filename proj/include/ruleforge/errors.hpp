#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ruleforge {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value violates a structural invariant (policy shape, index ranges).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Policy text that does not match the grammar. Line and column are 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// An operation was called in a state that does not allow it.
class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace ruleforge
