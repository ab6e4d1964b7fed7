#pragma once

#include <stdexcept>
#include <string>

namespace awareauto {

// Base for every error raised by the library. Grounding failures are not
// errors: they travel as GroundingError records inside a GroundedRule.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Syntax or structural error in a rule-text document. Line and column are
// 1-based; column 0 means the whole line.
class ParseError : public Error {
public:
    ParseError(const std::string& message, int line, int column)
        : Error(format(message, line, column)), message_(message), line_(line), column_(column) {}

    const std::string& reason() const { return message_; }
    int line() const { return line_; }
    int column() const { return column_; }

private:
    static std::string format(const std::string& message, int line, int column) {
        return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
    }

    std::string message_;
    int line_;
    int column_;
};

class TupleError : public Error {
public:
    using Error::Error;
};

// A JSON document that does not match the expected schema. `pointer` is a
// JSON pointer to the offending value.
class SchemaError : public Error {
public:
    SchemaError(const std::string& pointer, const std::string& message)
        : Error(pointer + ": " + message), pointer_(pointer) {}

    const std::string& pointer() const { return pointer_; }

private:
    std::string pointer_;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class NotFound : public Error {
public:
    using Error::Error;
};

} // namespace awareauto
