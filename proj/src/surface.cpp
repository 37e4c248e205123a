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

#include "segeval/surface.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "segeval/error.hpp"

namespace segeval {

std::string_view to_string(CoordinateSpace s) noexcept {
  return s == CoordinateSpace::Index ? "index" : "physical";
}

std::string_view to_string(Connectivity c) noexcept {
  return c == Connectivity::Six ? "6" : "26";
}

CoordinateSpace parse_coordinate_space(std::string_view text) {
  if (text == "index") return CoordinateSpace::Index;
  if (text == "physical") return CoordinateSpace::Physical;
  throw Error(ErrorCode::InvalidArgument, "unknown space '" + std::string(text) + "'");
}

Connectivity parse_connectivity(std::string_view text) {
  if (text == "6") return Connectivity::Six;
  if (text == "26") return Connectivity::TwentySix;
  throw Error(ErrorCode::InvalidArgument, "connectivity must be 6 or 26");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kParallelVoxels = 1 << 15;

Spacing effective_spacing(CoordinateSpace space, const Spacing& s) {
  return space == CoordinateSpace::Index ? Spacing{1.0, 1.0, 1.0} : s;
}

std::array<double, 3> coordinates(std::size_t x, std::size_t y, std::size_t z,
                                  const Spacing& s) {
  return {static_cast<double>(x) * s.sx, static_cast<double>(y) * s.sy,
          static_cast<double>(z) * s.sz};
}

bool is_boundary(const BinaryMask& mask, std::int64_t x, std::int64_t y, std::int64_t z,
                 Connectivity connectivity) {
  const Dims& d = mask.dims();
  auto member = [&](std::int64_t i, std::int64_t j, std::int64_t k) {
    if (i < 0 || j < 0 || k < 0 || i >= static_cast<std::int64_t>(d.nx) ||
        j >= static_cast<std::int64_t>(d.ny) || k >= static_cast<std::int64_t>(d.nz))
      return false;
    return mask.contains(static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                         static_cast<std::size_t>(k));
  };
  if (connectivity == Connectivity::Six) {
    return !member(x - 1, y, z) || !member(x + 1, y, z) || !member(x, y - 1, z) ||
           !member(x, y + 1, z) || !member(x, y, z - 1) || !member(x, y, z + 1);
  }
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx)
        if ((dx || dy || dz) && !member(x + dx, y + dy, z + dz)) return true;
  return false;
}

// One pass of the squared-distance lower envelope along a line:
// out[q] = min_p (w*(q-p)^2 + f[p]). Sites with f = inf are skipped.
struct EnvelopeScratch {
  std::vector<std::size_t> site;
  std::vector<double> boundary;
  std::vector<double> line_in;
  std::vector<double> line_out;

  void reserve(std::size_t n) {
    site.resize(n);
    boundary.resize(n + 1);
    line_in.resize(n);
    line_out.resize(n);
  }
};

void lower_envelope(std::size_t n, double w, EnvelopeScratch& s) {
  const double* f = s.line_in.data();
  double* out = s.line_out.data();
  std::size_t* v = s.site.data();
  double* z = s.boundary.data();

  std::ptrdiff_t k = -1;
  for (std::size_t q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    const double fq = f[q] + w * static_cast<double>(q) * static_cast<double>(q);
    double cut = -kInf;
    while (k >= 0) {
      const std::size_t p = v[k];
      const double fp = f[p] + w * static_cast<double>(p) * static_cast<double>(p);
      cut = (fq - fp) / (2.0 * w * static_cast<double>(q - p));
      if (cut > z[k]) break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = k == 0 ? -kInf : cut;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    std::fill(out, out + n, kInf);
    return;
  }
  std::ptrdiff_t j = 0;
  for (std::size_t q = 0; q < n; ++q) {
    while (z[j + 1] < static_cast<double>(q)) ++j;
    const double dq = static_cast<double>(q) - static_cast<double>(v[j]);
    out[q] = w * dq * dq + f[v[j]];
  }
}

// Runs the envelope along one axis for every line of the grid, in place.
void envelope_pass(std::vector<double>& grid, const Dims& d, int axis, double w) {
  const std::size_t len = axis == 0 ? d.nx : axis == 1 ? d.ny : d.nz;
  const std::size_t stride = axis == 0 ? 1 : axis == 1 ? d.nx : d.nx * d.ny;
  const std::size_t lines = grid.size() / len;
  // Map line number to the offset of its first voxel.
  auto line_origin = [&](std::size_t i) -> std::size_t {
    switch (axis) {
      case 0: return i * d.nx;                                  // (y,z)
      case 1: return (i % d.nx) + (i / d.nx) * d.nx * d.ny;     // (x,z)
      default: return i;                                        // (x,y)
    }
  };
  const auto nlines = static_cast<std::int64_t>(lines);
#pragma omp parallel if (grid.size() > kParallelVoxels)
  {
    EnvelopeScratch scratch;
    scratch.reserve(len);
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < nlines; ++i) {
      const std::size_t base = line_origin(static_cast<std::size_t>(i));
      for (std::size_t q = 0; q < len; ++q) scratch.line_in[q] = grid[base + q * stride];
      lower_envelope(len, w, scratch);
      for (std::size_t q = 0; q < len; ++q) grid[base + q * stride] = scratch.line_out[q];
    }
  }
}

void require_same_grid(const SurfacePointSet& s, const DistanceField& f) {
  if (s.dims != f.dims)
    throw Error(ErrorCode::GridMismatch, to_string(s.dims) + " vs " + to_string(f.dims));
  if (s.space != f.space)
    throw Error(ErrorCode::InvalidArgument, "surface and field use different spaces");
}

double squared_distance(const std::array<double, 3>& p, const std::array<double, 3>& q) {
  const double dx = p[0] - q[0], dy = p[1] - q[1], dz = p[2] - q[2];
  return dx * dx + dy * dy + dz * dz;
}

struct DirectedSums {
  double max = 0.0;
  double sum = 0.0;
  double sum_sq = 0.0;
};

SurfaceDistanceResult combine(const DirectedSums& am, const DirectedSums& ma, std::size_t na,
                              std::size_t nr, CoordinateSpace space) {
  SurfaceDistanceResult r;
  r.space = space;
  r.directed_h_am = am.max;
  r.directed_h_ma = ma.max;
  r.hausdorff = std::max(am.max, ma.max);
  const double pooled = static_cast<double>(na + nr);
  r.assd = (am.sum + ma.sum) / pooled;
  r.rms = std::sqrt((am.sum_sq + ma.sum_sq) / pooled);
  r.mean_distance =
      0.5 * (am.sum / static_cast<double>(na) + ma.sum / static_cast<double>(nr));
  return r;
}

DirectedSums directed_from_field(const SurfacePointSet& from, const DistanceField& field) {
  DirectedSums s;
  for (const std::size_t v : from.voxels) {
    const double d = field.values[v];
    s.max = std::max(s.max, d);
    s.sum += d;
    s.sum_sq += d * d;
  }
  return s;
}

DirectedSums directed_bruteforce(const SurfacePointSet& from, const SurfacePointSet& to) {
  DirectedSums s;
  for (const auto& p : from.points) {
    double best = kInf;
    for (const auto& q : to.points) best = std::min(best, squared_distance(p, q));
    const double d = std::sqrt(best);
    s.max = std::max(s.max, d);
    s.sum += d;
    s.sum_sq += d * d;
  }
  return s;
}

void require_nonempty(const SurfacePointSet& a, const SurfacePointSet& r) {
  if (a.empty() || r.empty())
    throw Error(ErrorCode::EmptySurface, "surface distances need two nonempty surfaces");
  if (a.space != r.space)
    throw Error(ErrorCode::InvalidArgument, "surfaces use different coordinate spaces");
}

}  // namespace

SurfacePointSet extract_surface(const BinaryMask& mask, CoordinateSpace space,
                                Connectivity connectivity) {
  if (mask.empty()) throw Error(ErrorCode::EmptyMask, "cannot extract the surface of an empty mask");
  const Dims& d = mask.dims();
  const Spacing s = effective_spacing(space, mask.spacing());
  std::vector<std::vector<std::size_t>> per_slice(d.nz);
  const auto nz = static_cast<std::int64_t>(d.nz);
#pragma omp parallel for schedule(static) if (d.voxel_count() > kParallelVoxels)
  for (std::int64_t z = 0; z < nz; ++z) {
    auto& slice = per_slice[static_cast<std::size_t>(z)];
    for (std::size_t y = 0; y < d.ny; ++y)
      for (std::size_t x = 0; x < d.nx; ++x)
        if (mask.contains(x, y, static_cast<std::size_t>(z)) &&
            is_boundary(mask, static_cast<std::int64_t>(x), static_cast<std::int64_t>(y), z,
                        connectivity))
          slice.push_back(d.linear(x, y, static_cast<std::size_t>(z)));
  }
  SurfacePointSet out{space, d, mask.spacing(), {}, {}};
  for (const auto& slice : per_slice) out.voxels.insert(out.voxels.end(), slice.begin(), slice.end());
  out.points.reserve(out.voxels.size());
  for (const std::size_t v : out.voxels) {
    const std::size_t x = v % d.nx, y = (v / d.nx) % d.ny, z = v / (d.nx * d.ny);
    out.points.push_back(coordinates(x, y, z, s));
  }
  return out;
}

SurfacePointSet make_point_set(std::span<const Index3> voxels, Dims dims, Spacing spacing,
                               CoordinateSpace space) {
  const Spacing s = effective_spacing(space, spacing);
  SurfacePointSet out{space, dims, spacing, {}, {}};
  std::vector<Index3> sorted(voxels.begin(), voxels.end());
  for (const auto& v : sorted)
    if (v.x >= dims.nx || v.y >= dims.ny || v.z >= dims.nz)
      throw Error(ErrorCode::InvalidArgument, "point outside grid " + to_string(dims));
  std::sort(sorted.begin(), sorted.end(), [&](const Index3& a, const Index3& b) {
    return dims.linear(a.x, a.y, a.z) < dims.linear(b.x, b.y, b.z);
  });
  for (const auto& v : sorted) {
    const std::size_t lin = dims.linear(v.x, v.y, v.z);
    if (!out.voxels.empty() && out.voxels.back() == lin) continue;
    out.voxels.push_back(lin);
    out.points.push_back(coordinates(v.x, v.y, v.z, s));
  }
  return out;
}

DistanceField distance_field(const SurfacePointSet& surface, Dims dims, Spacing spacing) {
  if (surface.empty()) throw Error(ErrorCode::EmptySurface, "distance field of an empty surface");
  if (surface.dims != dims)
    throw Error(ErrorCode::GridMismatch, to_string(surface.dims) + " vs " + to_string(dims));
  const Spacing s = effective_spacing(surface.space, spacing);
  std::vector<double> grid(dims.voxel_count(), kInf);
  for (const std::size_t v : surface.voxels) grid[v] = 0.0;
  envelope_pass(grid, dims, 0, s.sx * s.sx);
  envelope_pass(grid, dims, 1, s.sy * s.sy);
  envelope_pass(grid, dims, 2, s.sz * s.sz);
  const auto n = static_cast<std::int64_t>(grid.size());
#pragma omp parallel for schedule(static) if (grid.size() > kParallelVoxels)
  for (std::int64_t i = 0; i < n; ++i) grid[i] = std::sqrt(grid[i]);
  return DistanceField{dims, surface.space, std::move(grid)};
}

double directed_hausdorff(const SurfacePointSet& from, const DistanceField& to_field) {
  if (from.empty()) throw Error(ErrorCode::EmptySurface, "directed Hausdorff from an empty set");
  require_same_grid(from, to_field);
  return directed_from_field(from, to_field).max;
}

SurfaceDistanceResult surface_metrics(const SurfacePointSet& a, const SurfacePointSet& r,
                                      const DistanceField& field_a,
                                      const DistanceField& field_r) {
  require_nonempty(a, r);
  require_same_grid(a, field_r);
  require_same_grid(r, field_a);
  return combine(directed_from_field(a, field_r), directed_from_field(r, field_a), a.count(),
                 r.count(), a.space);
}

SurfaceDistanceResult surface_metrics_bruteforce(const SurfacePointSet& a,
                                                 const SurfacePointSet& r) {
  require_nonempty(a, r);
  return combine(directed_bruteforce(a, r), directed_bruteforce(r, a), a.count(), r.count(),
                 a.space);
}

SurfaceDistanceResult compare_surfaces(const BinaryMask& a, const BinaryMask& m,
                                       const SurfaceOptions& options) {
  check_compatible(a, m);
  const SurfacePointSet sa = extract_surface(a, options.space, options.connectivity);
  const SurfacePointSet sm = extract_surface(m, options.space, options.connectivity);
  const double pairs = static_cast<double>(sa.count()) * static_cast<double>(sm.count());
  if (pairs <= static_cast<double>(a.dims().voxel_count()))
    return surface_metrics_bruteforce(sa, sm);
  const DistanceField fa = distance_field(sa, a.dims(), a.spacing());
  const DistanceField fm = distance_field(sm, m.dims(), m.spacing());
  return surface_metrics(sa, sm, fa, fm);
}

namespace reference {

DistanceField distance_field_bruteforce(const SurfacePointSet& surface, Dims dims,
                                        Spacing spacing) {
  if (surface.empty()) throw Error(ErrorCode::EmptySurface, "distance field of an empty surface");
  const Spacing s = effective_spacing(surface.space, spacing);
  DistanceField out{dims, surface.space, std::vector<double>(dims.voxel_count())};
  for (std::size_t z = 0; z < dims.nz; ++z)
    for (std::size_t y = 0; y < dims.ny; ++y)
      for (std::size_t x = 0; x < dims.nx; ++x) {
        const auto p = coordinates(x, y, z, s);
        double best = kInf;
        for (const auto& q : surface.points) best = std::min(best, squared_distance(p, q));
        out.values[dims.linear(x, y, z)] = std::sqrt(best);
      }
  return out;
}

}  // namespace reference

}  // namespace segeval
