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

// Test-only helpers: independent NIfTI/rawvol writers, mask generators,
// brute-force oracles and synthetic cohorts.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "segeval/cohort.hpp"
#include "segeval/volume_io.hpp"

namespace fixtures {

using segeval::BinaryMask;
using segeval::Dims;
using segeval::Spacing;

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

struct NiftiSpec {
  Dims dims;
  Spacing spacing;
  std::vector<double> values;  ///< stored (pre-scaling) values
  std::int16_t datatype = 2;   ///< 2 uint8, 4 int16, 8 int32, 16 float32, 64 float64
  bool big_endian = false;
  float slope = 0.0f;
  float inter = 0.0f;
  std::int16_t rank = 3;
  std::int16_t dim4 = 1;
  const char* magic = "n+1";
};

std::vector<std::uint8_t> nifti_bytes(const NiftiSpec& spec);
std::vector<std::uint8_t> rawvol_bytes(const Dims& dims, const Spacing& spacing,
                                       const std::vector<double>& values,
                                       const std::string& datatype, bool big_endian = false);
std::vector<std::uint8_t> gzip_bytes(const std::vector<std::uint8_t>& plain);
void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

/// uint8 NIfTI of a mask (gzipped when the name ends in .gz).
void write_mask(const std::filesystem::path& path, const BinaryMask& mask);

BinaryMask make_mask(const Dims& dims, const Spacing& spacing,
                     const std::function<bool(std::size_t, std::size_t, std::size_t)>& inside);
BinaryMask ellipsoid(const Dims& dims, const Spacing& spacing, double cx, double cy, double cz,
                     double rx, double ry, double rz);
/// Union of a few random boxes and balls; never empty.
BinaryMask random_blob_mask(std::mt19937_64& rng, const Dims& dims, const Spacing& spacing);
/// Independent voxel coin flips; may be empty when density is tiny.
BinaryMask random_noise_mask(std::mt19937_64& rng, const Dims& dims, const Spacing& spacing,
                             double density);
/// One 6-neighbourhood dilation step, clipped to the grid.
BinaryMask dilate6(const BinaryMask& mask);
/// Shift by an integer offset; voxels moved outside the grid are dropped.
BinaryMask shift(const BinaryMask& mask, long dx, long dy, long dz);

namespace oracle {

struct Counts {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

/// Set-based enumeration of A and M member coordinates.
Counts enumerate_counts(const BinaryMask& a, const BinaryMask& m);

/// Boundary voxels by explicit neighbour enumeration.
std::vector<std::array<std::size_t, 3>> boundary_voxels(const BinaryMask& mask, int connectivity);

}  // namespace oracle

struct CohortOptions {
  std::size_t subjects = 4;
  std::vector<std::string> methods{"ABSS", "LocalInfo", "FreeSurfer"};
  Dims dims{24, 24, 24};
  Spacing spacing{1.0, 1.0, 1.0};
  bool both_sides = false;           ///< left and right structure per subject
  bool identity = false;             ///< auto == manual for every case
  std::size_t t1_5_subjects = 0;     ///< first N subjects tagged 1.5T, the rest 3T
  bool tag_field_strength = false;
  std::uint64_t seed = 1;
};

/// Writes .nii.gz masks and manifest.csv into `dir`; returns the manifest path.
/// Method i perturbs the manual mask by i shift/dilation steps.
std::filesystem::path write_synthetic_cohort(const std::filesystem::path& dir,
                                             const CohortOptions& options);

std::string read_text(const std::filesystem::path& path);

}  // namespace fixtures
