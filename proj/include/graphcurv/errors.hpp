#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace graphcurv {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised by the expression front-end. Carries the byte offset of the
/// offending token and a machine-readable kind.
class ParseError : public Error {
public:
    enum class Kind {
        Syntax,
        UnknownIdentifier,
        VariableOutOfRange,
        NonConstantExponent,
    };

    ParseError(Kind kind, const std::string& msg, std::size_t offset)
        : Error(msg + " (at offset " + std::to_string(offset) + ")"),
          kind_(kind),
          offset_(offset) {}

    Kind kind() const { return kind_; }
    std::size_t offset() const { return offset_; }

private:
    Kind kind_;
    std::size_t offset_;
};

/// Evaluation left the mathematical domain of an operation (division by
/// zero, log of a non-positive value, point outside the chart, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed input files or inconsistent run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A precondition of one of the estimates is violated (exponent outside
/// the admissible window, ball not compactly contained in the chart,
/// normal bundle not flat where flatness is required).
class HypothesisError : public Error {
public:
    using Error::Error;
};

}  // namespace graphcurv
