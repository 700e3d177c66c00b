#pragma once

#include <stdexcept>
#include <string>

namespace docqa {

// Base for all toolkit errors. The CLI maps the subclasses to exit codes:
// ConfigError -> 2, input-side errors -> 3, transport/protocol -> 4,
// anything else -> 5.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad configuration: patterns that do not compile, min_tokens >= max_tokens,
// malformed config files.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Bad input data: empty documents, missing files, unreadable stores.
class InputError : public Error {
public:
    using Error::Error;
};

// An operation was called with arguments violating its precondition.
class ArgumentError : public InputError {
public:
    using InputError::InputError;
};

// Structured text that does not follow its format. Carries the line number
// when one is known.
class ParseError : public InputError {
public:
    ParseError(const std::string& what, size_t line)
        : InputError(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    explicit ParseError(const std::string& what) : InputError(what), line_(0) {}

    size_t line() const { return line_; }

private:
    size_t line_;
};

// Data that parsed but violates an invariant (cyclic heads, duplicate ids,
// version mismatches).
class ValidationError : public InputError {
public:
    using InputError::InputError;
};

// A remote peer could not be reached.
class TransportError : public Error {
public:
    using Error::Error;
};

// A remote peer answered with something other than the expected protocol.
class ProtocolError : public Error {
public:
    using Error::Error;
};

} // namespace docqa
