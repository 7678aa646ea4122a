#pragma once

#include <stdexcept>
#include <string>

namespace fpl {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on caller-supplied arguments or configuration failed.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A computation produced a result outside its numerical contract
/// (non-finite values, failed quadrature convergence, imaginary residue).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A persisted artifact (weight table, snapshot) failed validation.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// The negative-part stability ratio exceeded its bound during a run.
class StabilityHalt : public Error {
 public:
  StabilityHalt(double time, double ratio, double bound)
      : Error("stability ratio " + std::to_string(ratio) + " exceeds bound " +
              std::to_string(bound) + " at t = " + std::to_string(time)),
        time_(time),
        ratio_(ratio) {}

  double time() const { return time_; }
  double ratio() const { return ratio_; }

 private:
  double time_;
  double ratio_;
};

}  // namespace fpl
