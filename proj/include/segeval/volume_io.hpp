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

/// \file volume_io.hpp
/// Label volume ingestion (NIfTI-1 single file, optionally gzipped, and the
/// repository's .rawvol fixture format), binarization and grid checks.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace segeval {

struct Dims {
  std::size_t nx = 1, ny = 1, nz = 1;

  std::size_t voxel_count() const noexcept { return nx * ny * nz; }
  std::size_t linear(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return x + nx * (y + ny * z);
  }
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Millimetres per voxel along each axis.
struct Spacing {
  double sx = 1.0, sy = 1.0, sz = 1.0;

  double voxel_volume() const noexcept { return sx * sy * sz; }
  friend bool operator==(const Spacing&, const Spacing&) = default;
};

std::string to_string(const Dims& d);
std::string to_string(const Spacing& s);

/// Scalar grid in x-fastest order. Values already carry the NIfTI
/// slope/intercept scaling. Immutable after construction.
class LabelVolume {
 public:
  LabelVolume(Dims dims, Spacing spacing, std::vector<double> data,
              std::string source_path = {});

  const Dims& dims() const noexcept { return dims_; }
  const Spacing& spacing() const noexcept { return spacing_; }
  std::span<const double> data() const noexcept { return data_; }
  const std::string& source_path() const noexcept { return source_path_; }

 private:
  Dims dims_;
  Spacing spacing_;
  std::vector<double> data_;
  std::string source_path_;
};

/// One membership flag (0 or 1) per voxel.
class BinaryMask {
 public:
  BinaryMask(Dims dims, Spacing spacing, std::vector<std::uint8_t> bits);

  const Dims& dims() const noexcept { return dims_; }
  const Spacing& spacing() const noexcept { return spacing_; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  bool contains(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return bits_[dims_.linear(x, y, z)] != 0;
  }
  std::size_t count() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }

 private:
  Dims dims_;
  Spacing spacing_;
  std::vector<std::uint8_t> bits_;
  std::size_t count_ = 0;
};

struct BinarizeRule {
  enum class Kind { Equals, GreaterThan, NonZero };
  Kind kind = Kind::NonZero;
  double value = 0.0;

  static BinarizeRule equals(double v) { return {Kind::Equals, v}; }
  static BinarizeRule greater_than(double t) { return {Kind::GreaterThan, t}; }
  static BinarizeRule nonzero() { return {Kind::NonZero, 0.0}; }

  bool holds(double v) const noexcept;
  friend bool operator==(const BinarizeRule&, const BinarizeRule&) = default;
};

/// Accepts "nonzero", "<number>" (equals), "=<number>" and ">number".
BinarizeRule parse_binarize_rule(const std::string& text);
std::string to_string(const BinarizeRule& rule);

LabelVolume load_volume(const std::filesystem::path& path);

/// Parses an in-memory file image (possibly gzip-compressed).
LabelVolume decode_volume(std::span<const std::uint8_t> bytes,
                          const std::string& source_path = {});

BinaryMask binarize(const LabelVolume& vol, const BinarizeRule& rule);

struct CompatibilityReport {
  Dims dims_a, dims_m;
  Spacing spacing_a, spacing_m;
};

inline constexpr double kSpacingRelTolerance = 1e-4;

/// Throws GridMismatch or SpacingMismatch.
CompatibilityReport check_compatible(const BinaryMask& a, const BinaryMask& m);

}  // namespace segeval
