#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sfq {

/// Stable error classes. The identifiers returned by `error_class_id` are part
/// of the command-line contract and must not change.
enum class ErrorClass {
  InvalidArgument,
  InvalidCircuit,
  Degeneracy,
  FrameConstruction,
  LevelIdentification,
  CalibrationFailed,
  ModeMismatch,
  BarrierDomain,
  LineSearch,
  NonFiniteCost,
  SnapFailed,
  InvalidAngles,
  DegenerateInput,
  ExtractionFailed,
  MissingCalibration,
  Parse,
  Format,
  UnsupportedRatio,
  Io,
};

std::string_view error_class_id(ErrorClass c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), class_(cls) {}

  ErrorClass error_class() const noexcept { return class_; }
  std::string_view class_id() const noexcept { return error_class_id(class_); }

 private:
  ErrorClass class_;
};

/// Carries the best objective reached by a calibration that missed tolerance.
class CalibrationError : public Error {
 public:
  CalibrationError(const std::string& what, double best_residual)
      : Error(ErrorClass::CalibrationFailed, what), best_residual_(best_residual) {}

  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

[[noreturn]] inline void fail(ErrorClass cls, const std::string& what) { throw Error(cls, what); }

inline void require(bool ok, ErrorClass cls, const std::string& what) {
  if (!ok) fail(cls, what);
}

}  // namespace sfq
