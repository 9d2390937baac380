#include "sfqgate/error.hpp"

namespace sfq {

std::string_view error_class_id(ErrorClass c) noexcept {
  switch (c) {
    case ErrorClass::InvalidArgument: return "invalid-argument";
    case ErrorClass::InvalidCircuit: return "invalid-circuit";
    case ErrorClass::Degeneracy: return "degeneracy";
    case ErrorClass::FrameConstruction: return "frame-construction";
    case ErrorClass::LevelIdentification: return "level-identification";
    case ErrorClass::CalibrationFailed: return "calibration-failed";
    case ErrorClass::ModeMismatch: return "mode-mismatch";
    case ErrorClass::BarrierDomain: return "barrier-domain";
    case ErrorClass::LineSearch: return "line-search";
    case ErrorClass::NonFiniteCost: return "non-finite-cost";
    case ErrorClass::SnapFailed: return "snap-failed";
    case ErrorClass::InvalidAngles: return "invalid-angles";
    case ErrorClass::DegenerateInput: return "degenerate-input";
    case ErrorClass::ExtractionFailed: return "extraction-failed";
    case ErrorClass::MissingCalibration: return "missing-calibration";
    case ErrorClass::Parse: return "parse";
    case ErrorClass::Format: return "format";
    case ErrorClass::UnsupportedRatio: return "unsupported-ratio";
    case ErrorClass::Io: return "io";
  }
  return "unknown";
}

}  // namespace sfq
