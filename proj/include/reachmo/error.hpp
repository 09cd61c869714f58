#ifndef REACHMO_ERROR_HPP
#define REACHMO_ERROR_HPP

#include <stdexcept>
#include <string>

namespace reachmo {

/// Operand shapes do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numeric argument outside the domain of the operation (non-finite, negative counts, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Network document does not match the schema. `path` names the offending field.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Document parsed but a model invariant is violated. `rule` names the invariant.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string rule, const std::string& what)
      : std::runtime_error("[" + rule + "] " + what), rule_(std::move(rule)) {}
  const std::string& rule() const noexcept { return rule_; }

 private:
  std::string rule_;
};

/// Requested analysis is not available for this model class.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Moment equations do not close (reaction of order >= 2 or non-affine law).
class NonClosedMomentsError : public UnsupportedError {
 public:
  using UnsupportedError::UnsupportedError;
};

/// A caller-side precondition does not hold.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Tangent point is not unique: some (A, b_r) pair fails the Kalman rank test.
class TangentUndefinedError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Mass-loss certificate outside [0, 1).
class InvalidCertificateError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Result of a computation failed its own consistency certificate.
class InternalInconsistency : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Enumeration or truncation size exceeds the configured cap.
class CapExceeded : public std::runtime_error {
 public:
  CapExceeded(const std::string& what, double required)
      : std::runtime_error(what), required_(required) {}
  double required() const noexcept { return required_; }

 private:
  double required_;
};

}  // namespace reachmo

#endif  // REACHMO_ERROR_HPP
