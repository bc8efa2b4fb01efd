#ifndef EXDAG_ERRORS_HPP
#define EXDAG_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace exdag {

/// Malformed graph construction: arity mismatch, unknown child, non-finite leaf.
class DagError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public DagError {
public:
  ParseError(std::size_t line, const std::string &what)
      : DagError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class EvaluationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DivisionByZero : public EvaluationError {
public:
  using EvaluationError::EvaluationError;
};

/// Even root of a negative radicand.
class DomainError : public EvaluationError {
public:
  using EvaluationError::EvaluationError;
};

/// An enclosure still straddles zero after the refinement cap; deciding the
/// sign would need separation bounds.
class SeparationError : public EvaluationError {
public:
  using EvaluationError::EvaluationError;
};

class PrecisionOverflow : public EvaluationError {
public:
  using EvaluationError::EvaluationError;
};

/// Path enumeration exceeded the configured budget.
class OracleScopeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// No root of the critical-path stationarity equation in the feasible range.
class DegenerateSplit : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace exdag

#endif // EXDAG_ERRORS_HPP
