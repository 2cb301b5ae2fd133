#pragma once

#include <stdexcept>
#include <string>

namespace mtlab {

enum class ErrorCode {
  kDomain = 1,
  kOverflow,
  kAccuracy,
  kDegenerate,
  kConstruction,
  kOptimization,
  kUnsupported,
  kSingularity,
  kInvalidArgument,
  kIo,
};

// Every failure raised by the library carries one of the codes above so the
// C boundary can translate it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class OverflowError : public Error {
 public:
  OverflowError(double exponent, const std::string& what)
      : Error(ErrorCode::kOverflow, what), exponent_(exponent) {}
  double exponent() const noexcept { return exponent_; }

 private:
  double exponent_;
};

class AccuracyError : public Error {
 public:
  AccuracyError(double estimate, double error_estimate, const std::string& what)
      : Error(ErrorCode::kAccuracy, what), estimate_(estimate), error_estimate_(error_estimate) {}
  double estimate() const noexcept { return estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double estimate_;
  double error_estimate_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace mtlab
