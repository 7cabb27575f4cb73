#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace forge {

/// Base class for every error raised by the pipeline library.
class ForgeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration (B*R != P, threshold out of range, ...).
class ConfigError : public ForgeError {
public:
    using ForgeError::ForgeError;
};

/// Malformed input record or file.
class FormatError : public ForgeError {
public:
    using ForgeError::ForgeError;
};

/// Raised by the lexer; the caller treats the file as broken.
class LexError : public ForgeError {
public:
    LexError(std::size_t line, std::string reason)
        : ForgeError("line " + std::to_string(line) + ": " + reason),
          line_(line),
          reason_(std::move(reason)) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::size_t line_;
    std::string reason_;
};

/// The external compiler could not be located or is not executable.
class ToolMissing : public ForgeError {
public:
    using ForgeError::ForgeError;
};

/// Stage inputs disagree with each other (e.g. a sample without a compile report).
class ConsistencyError : public ForgeError {
public:
    using ForgeError::ForgeError;
};

/// A completion response could not be turned into a label after all retries.
class LabelParseError : public ForgeError {
public:
    using ForgeError::ForgeError;
};

/// A sample lacks the rank or compile status needed for layer assignment.
class UnlabeledSample : public ForgeError {
public:
    using ForgeError::ForgeError;
};

/// Stage counts do not balance.
class IntegrityError : public ForgeError {
public:
    using ForgeError::ForgeError;
};

}  // namespace forge
