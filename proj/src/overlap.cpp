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

#include "segeval/overlap.hpp"

#include <cmath>
#include <cstddef>

#include "segeval/error.hpp"

namespace segeval {

namespace {
// Below this voxel count the reduction runs on the calling thread.
constexpr std::int64_t kParallelThreshold = 1 << 18;
}

ConfusionCounts confusion_counts(const BinaryMask& a, const BinaryMask& m) {
  check_compatible(a, m);
  const std::uint8_t* pa = a.bits().data();
  const std::uint8_t* pm = m.bits().data();
  const auto n = static_cast<std::int64_t>(a.bits().size());
  std::uint64_t both = 0, only_a = 0, only_m = 0;
#pragma omp parallel for reduction(+ : both, only_a, only_m) if (n > kParallelThreshold)
  for (std::int64_t i = 0; i < n; ++i) {
    const unsigned x = pa[i], y = pm[i];
    both += x & y;
    only_a += x & (y ^ 1u);
    only_m += (x ^ 1u) & y;
  }
  return {both, only_a, only_m, static_cast<std::uint64_t>(n) - both - only_a - only_m};
}

double dice(const ConfusionCounts& c) {
  const auto denom = 2 * c.tp + c.fp + c.fn;
  if (denom == 0) throw Error(ErrorCode::BothMasksEmpty, "dice undefined for two empty masks");
  return static_cast<double>(2 * c.tp) / static_cast<double>(denom);
}

double precision(const ConfusionCounts& c) {
  if (c.n_auto() == 0)
    throw Error(ErrorCode::EmptyAutomaticMask, "precision undefined for an empty automatic mask");
  return static_cast<double>(c.tp) / static_cast<double>(c.n_auto());
}

double similarity(const ConfusionCounts& c) {
  const auto denom = c.tp + c.fp + c.fn;
  if (denom == 0)
    throw Error(ErrorCode::BothMasksEmpty, "similarity undefined for two empty masks");
  return static_cast<double>(c.tp) / static_cast<double>(denom);
}

double sensitivity(const ConfusionCounts& c) {
  if (c.n_manual() == 0)
    throw Error(ErrorCode::EmptyManualMask, "sensitivity undefined for an empty manual mask");
  return static_cast<double>(c.tp) / static_cast<double>(c.n_manual());
}

std::string_view to_string(VolumeUnit u) noexcept {
  return u == VolumeUnit::Voxels ? "voxels" : "mm3";
}

VolumeUnit parse_volume_unit(std::string_view text) {
  if (text == "voxels") return VolumeUnit::Voxels;
  if (text == "mm3") return VolumeUnit::Mm3;
  throw Error(ErrorCode::InvalidArgument, "unknown volume unit '" + std::string(text) + "'");
}

double volume(const BinaryMask& mask, VolumeUnit unit) {
  const auto n = static_cast<double>(mask.count());
  return unit == VolumeUnit::Voxels ? n : n * mask.spacing().voxel_volume();
}

double ravd(const VolumePair& v) {
  if (!(v.v_manual > 0))
    throw Error(ErrorCode::ZeroManualVolume, "relative volume difference needs V_manual > 0");
  return (v.v_auto - v.v_manual) / v.v_manual;
}

double normalized_volume_difference(const VolumePair& v) { return std::abs(ravd(v)); }

OverlapResult overlap_metrics(const ConfusionCounts& c, const VolumePair& v) {
  return {dice(c), precision(c), similarity(c), sensitivity(c), ravd(v)};
}

}  // namespace segeval
