#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace confound {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (DAG DSL, model file, JSON Lines, CSV).
/// `line` and `column` are 1-based; 0 means unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column = 0)
        : Error(format(message, line, column)), line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string format(const std::string& message, std::size_t line, std::size_t column) {
        if (line == 0) return message;
        std::string where = "line " + std::to_string(line);
        if (column != 0) where += ", column " + std::to_string(column);
        return where + ": " + message;
    }

    std::size_t line_;
    std::size_t column_;
};

/// Well-formed input that breaks a structural invariant (cycle, duplicate id,
/// dimension mismatch, unnormalized table, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A query that is valid but cannot be answered for the given data
/// (inadmissible adjustment set, insufficient cohort, degenerate sample).
class DomainError : public Error {
public:
    using Error::Error;
};

}  // namespace confound
