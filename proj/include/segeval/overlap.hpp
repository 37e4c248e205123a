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

/// \file overlap.hpp
/// Voxel-overlap scores between an automatic mask A and a manual mask M,
/// and the volume agreement measures built on them.

#pragma once

#include <cstdint>
#include <string_view>

#include "segeval/volume_io.hpp"

namespace segeval {

struct ConfusionCounts {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;

  std::uint64_t n_auto() const noexcept { return tp + fp; }
  std::uint64_t n_manual() const noexcept { return tp + fn; }
  std::uint64_t total() const noexcept { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Parallel tally over the common grid. Throws GridMismatch/SpacingMismatch.
ConfusionCounts confusion_counts(const BinaryMask& a, const BinaryMask& m);

double dice(const ConfusionCounts& c);         ///< 2tp/(2tp+fp+fn); BothMasksEmpty
double precision(const ConfusionCounts& c);    ///< tp/(tp+fp); EmptyAutomaticMask
double similarity(const ConfusionCounts& c);   ///< tp/(tp+fp+fn); BothMasksEmpty
double sensitivity(const ConfusionCounts& c);  ///< tp/(tp+fn); EmptyManualMask

enum class VolumeUnit { Voxels, Mm3 };

std::string_view to_string(VolumeUnit u) noexcept;
VolumeUnit parse_volume_unit(std::string_view text);

double volume(const BinaryMask& mask, VolumeUnit unit);

struct VolumePair {
  double v_auto = 0.0;
  double v_manual = 0.0;
  VolumeUnit unit = VolumeUnit::Mm3;
};

/// Signed (V_A - V_M) / V_M. Throws ZeroManualVolume.
double ravd(const VolumePair& v);

/// |V_A - V_M| / V_M, the unsigned form used in volume tables.
double normalized_volume_difference(const VolumePair& v);

inline constexpr std::string_view kNormalizedDifferenceFormula = "|V_auto-V_manual|/V_manual";

struct OverlapResult {
  double dice = 0.0;
  double precision = 0.0;
  double similarity = 0.0;
  double sensitivity = 0.0;
  double ravd = 0.0;
};

OverlapResult overlap_metrics(const ConfusionCounts& c, const VolumePair& v);

}  // namespace segeval
