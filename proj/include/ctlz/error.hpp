#pragma once

#include <stdexcept>
#include <string>

namespace ctlz {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Syntax or well-formedness error in textual input; line and column are 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& message, int line, int column)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message), line_(line), column_(column) {}

    [[nodiscard]] int line() const { return line_; }
    [[nodiscard]] int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// A relation symbol or element is not supported by the selected domain or target.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A model or structure violates its structural invariants.
class ModelError : public Error {
public:
    using Error::Error;
};

/// A configured resource limit (window count, evaluator size) would be exceeded.
class LimitError : public Error {
public:
    using Error::Error;
};

}  // namespace ctlz
