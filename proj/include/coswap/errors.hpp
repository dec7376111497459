#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace coswap {

// Base for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& message) : std::runtime_error(message) {}
};

// Syntax/semantic error in a textual input (config document, condition
// expression, port id). Carries the character offset where known.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::optional<std::size_t> offset = std::nullopt)
        : Error(offset ? message + " (at offset " + std::to_string(*offset) + ")" : message),
          offset_(offset) {}

    std::optional<std::size_t> offset() const { return offset_; }

private:
    std::optional<std::size_t> offset_;
};

// Out-of-order call on a simulation unit, unknown variable, bad step size.
class LifecycleError : public Error {
public:
    using Error::Error;
};

// Type mismatch when setting/comparing values.
class TypeError : public Error {
public:
    using Error::Error;
};

// Failure inside the simulation loop (unit failure, latch implication
// violation, unsolvable initialization order at run start).
class EngineError : public Error {
public:
    using Error::Error;
};

} // namespace coswap
