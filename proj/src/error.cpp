// Copyright 2026 The layoutjoint Authors
// SPDX-License-Identifier: Apache-2.0

#include "layoutjoint/error.hpp"

namespace layoutjoint {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kEmptyInstanceText: return "EmptyInstanceText";
    case ErrorCode::kEmptyGlobalText: return "EmptyGlobalText";
    case ErrorCode::kDegenerateBox: return "DegenerateBox";
    case ErrorCode::kOutOfRangeCoordinate: return "OutOfRangeCoordinate";
    case ErrorCode::kTooManyInstances: return "TooManyInstances";
    case ErrorCode::kNoInstances: return "NoInstances";
    case ErrorCode::kInvalidLayout: return "InvalidLayout";
    case ErrorCode::kStepOutOfRange: return "StepOutOfRange";
    case ErrorCode::kNonPositiveResolution: return "NonPositiveResolution";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyRow: return "EmptyRow";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kFormatError: return "FormatError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      detail_(message) {}

}  // namespace layoutjoint
