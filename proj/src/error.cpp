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

#include "segeval/error.hpp"

namespace segeval {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::UnsupportedDatatype: return "UnsupportedDatatype";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::NonPositiveSpacing: return "NonPositiveSpacing";
    case ErrorCode::DuplicateCase: return "DuplicateCase";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::UnknownStructure: return "UnknownStructure";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::SpacingMismatch: return "SpacingMismatch";
    case ErrorCode::BothMasksEmpty: return "BothMasksEmpty";
    case ErrorCode::EmptyAutomaticMask: return "EmptyAutomaticMask";
    case ErrorCode::EmptyManualMask: return "EmptyManualMask";
    case ErrorCode::ZeroManualVolume: return "ZeroManualVolume";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::EmptySurface: return "EmptySurface";
    case ErrorCode::AllCasesFailed: return "AllCasesFailed";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::TooFewGroups: return "TooFewGroups";
    case ErrorCode::InconsistentMethods: return "InconsistentMethods";
    case ErrorCode::EmptySubgroup: return "EmptySubgroup";
    case ErrorCode::UnknownMetric: return "UnknownMetric";
  }
  return "Unknown";
}

ErrorCategory error_category(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::GridMismatch:
    case ErrorCode::SpacingMismatch:
    case ErrorCode::BothMasksEmpty:
    case ErrorCode::EmptyAutomaticMask:
    case ErrorCode::EmptyManualMask:
    case ErrorCode::ZeroManualVolume:
    case ErrorCode::EmptyMask:
    case ErrorCode::EmptySurface:
    case ErrorCode::AllCasesFailed:
      return ErrorCategory::Metric;
    case ErrorCode::DegenerateData:
    case ErrorCode::TooFewGroups:
    case ErrorCode::InconsistentMethods:
    case ErrorCode::EmptySubgroup:
    case ErrorCode::UnknownMetric:
      return ErrorCategory::Statistics;
    default:
      return ErrorCategory::Input;
  }
}

std::string Error::describe() const {
  std::string out(error_code_name(code_));
  out += ": ";
  out += what();
  return out;
}

}  // namespace segeval
