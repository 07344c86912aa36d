#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace trichar {

/// Base class of every error raised by the library. The CLI maps these to
/// exit code 1 (input errors) or 2 (verification failures).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments or operator data.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A scenario document does not conform to the schema. `pointer()` is the
/// JSON pointer of the offending field.
class SchemaError : public InvalidInput {
 public:
  SchemaError(std::string pointer, const std::string& what)
      : InvalidInput(pointer + ": " + what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

// symbol_core
class DiscriminantPositive : public Error {
 public:
  DiscriminantPositive(double discriminant, const std::string& where)
      : Error("discriminant " + std::to_string(discriminant) +
              " > 0 (complex characteristic roots) at " + where),
        discriminant_(discriminant) {}
  double discriminant() const noexcept { return discriminant_; }

 private:
  double discriminant_;
};

class ScanFailed : public Error {
 public:
  using Error::Error;
};

// geometry
class NotCritical : public Error {
 public:
  NotCritical(double grad_norm, const std::string& where)
      : Error("point is not critical (|dp| = " + std::to_string(grad_norm) +
              ") at " + where),
        grad_norm_(grad_norm) {}
  double grad_norm() const noexcept { return grad_norm_; }

 private:
  double grad_norm_;
};

// mode_solver
class StepFailure : public Error {
 public:
  StepFailure(double location, const std::string& what)
      : Error(what + " at s = " + std::to_string(location)),
        location_(location) {}
  double location() const noexcept { return location_; }

 private:
  double location_;
};

class ToleranceUnachievable : public Error {
 public:
  ToleranceUnachievable(double location, const std::string& what)
      : Error(what + " at s = " + std::to_string(location)),
        location_(location) {}
  double location() const noexcept { return location_; }

 private:
  double location_;
};

// energy_verifier
class InconsistentSweep : public Error {
 public:
  using Error::Error;
};

class NoStabilization : public Error {
 public:
  using Error::Error;
};

// wellposedness_probe
class DegenerateCase : public Error {
 public:
  using Error::Error;
};

class IllPosedCase : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

}  // namespace trichar
