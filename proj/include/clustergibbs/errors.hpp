#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace clustergibbs {

// Malformed Pauli text; `position` is the byte offset of the offending token.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what + " (at position " + std::to_string(position) + ")"),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

// Invalid model file or Hamiltonian content.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid schedule file or a schedule that cannot measure every qubit.
class ScheduleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A documented precondition of an operation was violated by the caller.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// beta >= beta_* under the error policy: the truncation bound no longer holds.
class GuaranteeVoid : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An observable is not diagonal in the basis that was actually measured.
class BasisIncompatible : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace clustergibbs
