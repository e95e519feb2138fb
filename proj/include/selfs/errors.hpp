#pragma once

#include <stdexcept>
#include <string>

namespace selfs {

/// Malformed or truncated GRID1 input.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Payload ended before rows*cols values (or the eval mask) were read.
class TruncationError : public FormatError {
public:
    using FormatError::FormatError;
};

/// A value violates a type invariant (non-binary mask, probability outside [0,1], ...).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Caller passed arguments that do not satisfy an operation's precondition.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Non-finite values or numerical breakdown inside a pipeline stage.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace selfs
