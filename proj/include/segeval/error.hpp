// Copyright 2026 The segeval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace segeval {

enum class ErrorCode {
  // input / manifest
  IoError,
  UnsupportedFormat,
  UnsupportedDatatype,
  CorruptFile,
  NonPositiveSpacing,
  DuplicateCase,
  MalformedRow,
  UnknownStructure,
  MalformedCsv,
  InvalidArgument,
  // metric domain
  GridMismatch,
  SpacingMismatch,
  BothMasksEmpty,
  EmptyAutomaticMask,
  EmptyManualMask,
  ZeroManualVolume,
  EmptyMask,
  EmptySurface,
  AllCasesFailed,
  // statistics
  DegenerateData,
  TooFewGroups,
  InconsistentMethods,
  EmptySubgroup,
  UnknownMetric,
};

enum class ErrorCategory { Input, Metric, Statistics };

std::string_view error_code_name(ErrorCode code) noexcept;
ErrorCategory error_category(ErrorCode code) noexcept;

/// Every failure raised by the library. what() carries the detail text only;
/// callers that want "Code: detail" use describe().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return error_category(code_); }
  std::string describe() const;

 private:
  ErrorCode code_;
};

}  // namespace segeval
