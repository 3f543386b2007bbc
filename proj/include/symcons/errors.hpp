#pragma once

#include <stdexcept>
#include <string>

namespace symcons {

/// Raised when constant folding would produce a non-finite value
/// (division by a constant zero, log/sqrt of a negative constant, ...).
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// A variable reachable from a lowering root is missing from the parameter list.
class UnboundVariable : public std::runtime_error {
 public:
  explicit UnboundVariable(const std::string& name)
      : std::runtime_error("unbound variable: " + name), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Program validation failure; carries the index of the first malformed instruction.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::size_t index, const std::string& what)
      : std::runtime_error("instruction " + std::to_string(index) + ": " + what),
        index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Wrong number of inputs passed to a prepared program.
class ArityMismatch : public std::runtime_error {
 public:
  ArityMismatch(std::size_t expected, std::size_t got)
      : std::runtime_error("expected " + std::to_string(expected) + " inputs, got " +
                           std::to_string(got)) {}
};

}  // namespace symcons
