#ifndef FINSLERKIT_ERRORS_HPP
#define FINSLERKIT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace finslerkit {

/// Raised when a jet operation leaves the domain of the function it
/// evaluates (sqrt of a negative number, division by ~0, a non-finite
/// result, ...). Carries the offending argument value.
class DomainError : public std::domain_error {
 public:
  DomainError(const std::string& what, double offending_value)
      : std::domain_error(what), offending_value_(offending_value) {}

  double offending_value() const noexcept { return offending_value_; }

 private:
  double offending_value_;
};

/// A DomainError raised while evaluating an expression; `offset` is the byte
/// offset of the AST node that failed in the expression source.
class EvalError : public DomainError {
 public:
  EvalError(const std::string& what, double offending_value,
            std::size_t offset)
      : DomainError(what, offending_value), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class ParseError : public std::invalid_argument {
 public:
  enum class Kind { syntax, unknown_variable, unknown_function };

  ParseError(Kind kind, const std::string& what, std::size_t offset)
      : std::invalid_argument(what), kind_(kind), offset_(offset) {}

  Kind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

/// Bad user input: config files, builtin parameters, sampling plans.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The fundamental tensor is not positive definite at a point.
class ConvexityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace finslerkit

#endif  // FINSLERKIT_ERRORS_HPP
