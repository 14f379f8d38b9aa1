#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace ldb {

/// Network, evidence or parameter data that violates a model invariant.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A transfer function was asked to evaluate outside its admissible domain.
/// When the offending argument belongs to a specific output unit, the index
/// is carried along so callers can name it in diagnostics.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what,
                       std::optional<std::size_t> output = std::nullopt)
      : std::domain_error(what), output_(output) {}

  std::optional<std::size_t> output() const noexcept { return output_; }

 private:
  std::optional<std::size_t> output_;
};

/// Exhaustive enumeration was requested on a network that is too large.
class EnumerationLimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Evidence that has zero probability (exactly, or provably by its bounds).
class ImpossibleEvidence : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The optimizer could not find parameters with a non-vacuous lower bound.
class InfeasibleStart : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed network or evidence file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ldb
