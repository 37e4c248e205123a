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

/// \file surface.hpp
/// Boundary-voxel extraction and surface-to-surface distances.
///
/// Two routes compute the same numbers. The field route builds an exact
/// Euclidean distance transform of each surface (separable lower envelope of
/// parabolas, OpenMP over scan lines) and samples it at the other surface's
/// voxels. The brute-force route evaluates every pair of surface points and
/// is kept as the serial reference.

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "segeval/volume_io.hpp"

namespace segeval {

enum class CoordinateSpace { Index, Physical };
enum class Connectivity { Six = 6, TwentySix = 26 };

std::string_view to_string(CoordinateSpace s) noexcept;
std::string_view to_string(Connectivity c) noexcept;
CoordinateSpace parse_coordinate_space(std::string_view text);
Connectivity parse_connectivity(std::string_view text);

struct Index3 {
  std::size_t x = 0, y = 0, z = 0;
};

/// Voxel centres of a boundary. `voxels` holds linear grid offsets in
/// ascending order; `points` the matching coordinates in `space`.
struct SurfacePointSet {
  CoordinateSpace space = CoordinateSpace::Index;
  Dims dims;
  Spacing spacing;
  std::vector<std::size_t> voxels;
  std::vector<std::array<double, 3>> points;

  std::size_t count() const noexcept { return voxels.size(); }
  bool empty() const noexcept { return voxels.empty(); }
};

/// Member voxels with at least one non-member neighbour (grid exterior counts
/// as non-member). Throws EmptyMask.
SurfacePointSet extract_surface(const BinaryMask& mask, CoordinateSpace space,
                                Connectivity connectivity = Connectivity::Six);

/// Builds a point set from explicit voxel indices. Throws InvalidArgument when
/// an index lies outside `dims`.
SurfacePointSet make_point_set(std::span<const Index3> voxels, Dims dims, Spacing spacing,
                               CoordinateSpace space);

struct DistanceField {
  Dims dims;
  CoordinateSpace space = CoordinateSpace::Index;
  std::vector<double> values;

  double at(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return values[dims.linear(x, y, z)];
  }
};

/// Exact Euclidean distance from every voxel centre to the nearest point of
/// `surface`. In index space the spacing argument is ignored (unit cubes).
/// Throws EmptySurface.
DistanceField distance_field(const SurfacePointSet& surface, Dims dims, Spacing spacing);

/// Max over `from` of the distance to the field's surface.
double directed_hausdorff(const SurfacePointSet& from, const DistanceField& to_field);

struct SurfaceDistanceResult {
  double hausdorff = 0.0;
  double rms = 0.0;
  double assd = 0.0;
  double mean_distance = 0.0;  ///< mean of the two directed mean distances
  double directed_h_am = 0.0;
  double directed_h_ma = 0.0;
  CoordinateSpace space = CoordinateSpace::Index;
};

inline constexpr std::string_view kMeanDistanceDefinition =
    "0.5*(mean_a d(a,S_R) + mean_r d(r,S_A))";

/// field_a is the distance field of `a`, field_r that of `r`.
SurfaceDistanceResult surface_metrics(const SurfacePointSet& a, const SurfacePointSet& r,
                                      const DistanceField& field_a,
                                      const DistanceField& field_r);

/// Literal pairwise evaluation, O(|a|*|r|).
SurfaceDistanceResult surface_metrics_bruteforce(const SurfacePointSet& a,
                                                 const SurfacePointSet& r);

struct SurfaceOptions {
  CoordinateSpace space = CoordinateSpace::Index;
  Connectivity connectivity = Connectivity::Six;
};

/// Extracts both surfaces and picks the field route when |S_A|*|S_R| exceeds
/// the grid size, brute force otherwise.
SurfaceDistanceResult compare_surfaces(const BinaryMask& a, const BinaryMask& m,
                                       const SurfaceOptions& options);

namespace reference {

/// O(grid * |surface|) evaluation of distance_field.
DistanceField distance_field_bruteforce(const SurfacePointSet& surface, Dims dims,
                                        Spacing spacing);

}  // namespace reference

}  // namespace segeval
