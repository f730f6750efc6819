#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sgl {

// Invalid inputs: shape mismatches, out-of-range parameters, bad partitions.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Non-finite values or a breakdown that indicates an inconsistent computation.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operation refused because the instance is outside a supported size bound.
class CapabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(
              line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    // 1-based line number, 0 when the error is not tied to a line.
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace sgl
