// Copyright 2026 The layoutjoint Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace layoutjoint {

// Numeric values are part of the C ABI (see layoutjoint.h); append only.
enum class ErrorCode : int {
  kEmptyInstanceText = 1,
  kEmptyGlobalText = 2,
  kDegenerateBox = 3,
  kOutOfRangeCoordinate = 4,
  kTooManyInstances = 5,
  kNoInstances = 6,
  kInvalidLayout = 7,
  kStepOutOfRange = 8,
  kNonPositiveResolution = 9,
  kDimensionMismatch = 10,
  kEmptyRow = 11,
  kInvalidArgument = 12,
  kIoError = 13,
  kFormatError = 14,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  // Message without the code-name prefix that what() carries.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace layoutjoint
