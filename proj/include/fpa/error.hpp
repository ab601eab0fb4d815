#pragma once

#include <stdexcept>
#include <string>

namespace fpa {

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorKind {
    Usage,        // bad command-line arguments
    Io,           // file could not be read or written
    Parse,        // malformed document or literal
    Validation,   // well-formed input that violates a model invariant
    Domain,       // operation precondition not met (e.g. value outside support)
    Budget,       // enumeration budget exceeded
    Unsupported,  // input outside the supported problem class
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace fpa
