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

#include "fixtures.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace fixtures {

TempDir::TempDir() {
  static std::mt19937_64 rng{std::random_device{}()};
  for (;;) {
    auto candidate = std::filesystem::temp_directory_path() /
                     ("segeval-test-" + std::to_string(rng() % 100000000));
    if (std::filesystem::create_directory(candidate)) {
      path_ = candidate;
      return;
    }
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

namespace {

template <typename T>
void put(std::vector<std::uint8_t>& buf, std::size_t offset, T value, bool big_endian) {
  std::array<std::uint8_t, sizeof(T)> raw;
  std::memcpy(raw.data(), &value, sizeof(T));
  if (big_endian) std::reverse(raw.begin(), raw.end());  // host is little-endian
  std::copy(raw.begin(), raw.end(), buf.begin() + static_cast<std::ptrdiff_t>(offset));
}

template <typename T>
void append(std::vector<std::uint8_t>& buf, T value, bool big_endian) {
  const std::size_t at = buf.size();
  buf.resize(at + sizeof(T));
  put(buf, at, value, big_endian);
}

void append_value(std::vector<std::uint8_t>& buf, double v, const std::string& type, bool be) {
  if (type == "uint8") append(buf, static_cast<std::uint8_t>(v), be);
  else if (type == "int16") append(buf, static_cast<std::int16_t>(v), be);
  else if (type == "int32") append(buf, static_cast<std::int32_t>(v), be);
  else if (type == "float32") append(buf, static_cast<float>(v), be);
  else if (type == "float64") append(buf, v, be);
  else throw std::invalid_argument("fixture datatype " + type);
}

std::string nifti_type_name(std::int16_t code) {
  switch (code) {
    case 2: return "uint8";
    case 4: return "int16";
    case 8: return "int32";
    case 16: return "float32";
    case 64: return "float64";
    case 256: return "int8";
    default: return "uint8";
  }
}

}  // namespace

std::vector<std::uint8_t> nifti_bytes(const NiftiSpec& s) {
  std::vector<std::uint8_t> buf(352, 0);
  const bool be = s.big_endian;
  put<std::int32_t>(buf, 0, 348, be);
  const std::array<std::int16_t, 8> dim{s.rank,
                                        static_cast<std::int16_t>(s.dims.nx),
                                        static_cast<std::int16_t>(s.dims.ny),
                                        static_cast<std::int16_t>(s.dims.nz),
                                        s.dim4, 1, 1, 1};
  for (int i = 0; i < 8; ++i) put<std::int16_t>(buf, 40 + 2 * i, dim[i], be);
  put<std::int16_t>(buf, 70, s.datatype, be);
  const std::string type = nifti_type_name(s.datatype);
  const std::int16_t bitpix = type == "uint8" || type == "int8" ? 8
                              : type == "int16"                 ? 16
                              : type == "float64"               ? 64
                                                                : 32;
  put<std::int16_t>(buf, 72, bitpix, be);
  const std::array<float, 8> pix{1.0f, static_cast<float>(s.spacing.sx),
                                 static_cast<float>(s.spacing.sy),
                                 static_cast<float>(s.spacing.sz), 1.0f, 1.0f, 1.0f, 1.0f};
  for (int i = 0; i < 8; ++i) put<float>(buf, 76 + 4 * i, pix[i], be);
  put<float>(buf, 108, 352.0f, be);
  put<float>(buf, 112, s.slope, be);
  put<float>(buf, 116, s.inter, be);
  std::memcpy(buf.data() + 344, s.magic, std::strlen(s.magic) + 1);
  if (type == "int8") {
    for (double v : s.values) append(buf, static_cast<std::int8_t>(v), be);
  } else {
    for (double v : s.values) append_value(buf, v, type, be);
  }
  return buf;
}

std::vector<std::uint8_t> rawvol_bytes(const Dims& dims, const Spacing& spacing,
                                       const std::vector<double>& values,
                                       const std::string& datatype, bool big_endian) {
  std::ostringstream head;
  head.imbue(std::locale::classic());
  head.precision(17);
  head << "RAWVOL 1\n"
       << "dims " << dims.nx << " " << dims.ny << " " << dims.nz << "\n"
       << "spacing " << spacing.sx << " " << spacing.sy << " " << spacing.sz << "\n"
       << "datatype " << datatype << "\n"
       << "endian " << (big_endian ? "big" : "little") << "\n"
       << "data\n";
  const std::string h = head.str();
  std::vector<std::uint8_t> buf(h.begin(), h.end());
  for (double v : values) append_value(buf, v, datatype, big_endian);
  return buf;
}

std::vector<std::uint8_t> gzip_bytes(const std::vector<std::uint8_t>& plain) {
  z_stream zs{};
  if (deflateInit2(&zs, 1, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK)
    throw std::runtime_error("deflateInit2");
  std::vector<std::uint8_t> out(deflateBound(&zs, static_cast<uLong>(plain.size())) + 32);
  zs.next_in = const_cast<Bytef*>(plain.data());
  zs.avail_in = static_cast<uInt>(plain.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  if (deflate(&zs, Z_FINISH) != Z_STREAM_END) {
    deflateEnd(&zs);
    throw std::runtime_error("deflate");
  }
  out.resize(zs.total_out);
  deflateEnd(&zs);
  return out;
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

void write_mask(const std::filesystem::path& path, const BinaryMask& mask) {
  NiftiSpec spec;
  spec.dims = mask.dims();
  spec.spacing = mask.spacing();
  spec.values.assign(mask.bits().begin(), mask.bits().end());
  auto bytes = nifti_bytes(spec);
  if (path.extension() == ".gz") bytes = gzip_bytes(bytes);
  write_bytes(path, bytes);
}

BinaryMask make_mask(const Dims& dims, const Spacing& spacing,
                     const std::function<bool(std::size_t, std::size_t, std::size_t)>& inside) {
  std::vector<std::uint8_t> bits(dims.voxel_count());
  for (std::size_t z = 0; z < dims.nz; ++z)
    for (std::size_t y = 0; y < dims.ny; ++y)
      for (std::size_t x = 0; x < dims.nx; ++x) bits[dims.linear(x, y, z)] = inside(x, y, z);
  return BinaryMask(dims, spacing, std::move(bits));
}

BinaryMask ellipsoid(const Dims& dims, const Spacing& spacing, double cx, double cy, double cz,
                     double rx, double ry, double rz) {
  return make_mask(dims, spacing, [&](std::size_t x, std::size_t y, std::size_t z) {
    const double u = (static_cast<double>(x) - cx) / rx;
    const double v = (static_cast<double>(y) - cy) / ry;
    const double w = (static_cast<double>(z) - cz) / rz;
    return u * u + v * v + w * w <= 1.0;
  });
}

BinaryMask random_blob_mask(std::mt19937_64& rng, const Dims& dims, const Spacing& spacing) {
  std::uniform_int_distribution<int> count(1, 3);
  const int parts = count(rng);
  struct Part {
    bool ball;
    double c[3], r[3];
  };
  std::vector<Part> shapes;
  const std::array<double, 3> extent{static_cast<double>(dims.nx), static_cast<double>(dims.ny),
                                     static_cast<double>(dims.nz)};
  for (int i = 0; i < parts; ++i) {
    Part p{};
    p.ball = std::bernoulli_distribution(0.5)(rng);
    for (int k = 0; k < 3; ++k) {
      p.c[k] = std::uniform_real_distribution<double>(0, extent[k] - 1)(rng);
      p.r[k] = std::uniform_real_distribution<double>(0.5, std::max(1.0, extent[k] / 3))(rng);
    }
    shapes.push_back(p);
  }
  auto mask = make_mask(dims, spacing, [&](std::size_t x, std::size_t y, std::size_t z) {
    const double q[3] = {static_cast<double>(x), static_cast<double>(y), static_cast<double>(z)};
    for (const auto& p : shapes) {
      bool in = true;
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) {
        const double t = (q[k] - p.c[k]) / p.r[k];
        if (p.ball) acc += t * t;
        else in = in && std::abs(t) <= 1.0;
      }
      if (p.ball ? acc <= 1.0 : in) return true;
    }
    return false;
  });
  if (mask.empty()) {
    std::vector<std::uint8_t> bits(mask.bits().begin(), mask.bits().end());
    bits[dims.linear(static_cast<std::size_t>(shapes[0].c[0]), static_cast<std::size_t>(shapes[0].c[1]),
                     static_cast<std::size_t>(shapes[0].c[2]))] = 1;
    return BinaryMask(dims, spacing, std::move(bits));
  }
  return mask;
}

BinaryMask random_noise_mask(std::mt19937_64& rng, const Dims& dims, const Spacing& spacing,
                             double density) {
  std::bernoulli_distribution coin(density);
  std::vector<std::uint8_t> bits(dims.voxel_count());
  for (auto& b : bits) b = coin(rng);
  return BinaryMask(dims, spacing, std::move(bits));
}

BinaryMask dilate6(const BinaryMask& mask) {
  const Dims& d = mask.dims();
  return make_mask(d, mask.spacing(), [&](std::size_t x, std::size_t y, std::size_t z) {
    if (mask.contains(x, y, z)) return true;
    if (x > 0 && mask.contains(x - 1, y, z)) return true;
    if (x + 1 < d.nx && mask.contains(x + 1, y, z)) return true;
    if (y > 0 && mask.contains(x, y - 1, z)) return true;
    if (y + 1 < d.ny && mask.contains(x, y + 1, z)) return true;
    if (z > 0 && mask.contains(x, y, z - 1)) return true;
    if (z + 1 < d.nz && mask.contains(x, y, z + 1)) return true;
    return false;
  });
}

BinaryMask shift(const BinaryMask& mask, long dx, long dy, long dz) {
  const Dims& d = mask.dims();
  return make_mask(d, mask.spacing(), [&](std::size_t x, std::size_t y, std::size_t z) {
    const long sx = static_cast<long>(x) - dx, sy = static_cast<long>(y) - dy,
               sz = static_cast<long>(z) - dz;
    if (sx < 0 || sy < 0 || sz < 0 || sx >= static_cast<long>(d.nx) ||
        sy >= static_cast<long>(d.ny) || sz >= static_cast<long>(d.nz))
      return false;
    return mask.contains(static_cast<std::size_t>(sx), static_cast<std::size_t>(sy),
                         static_cast<std::size_t>(sz));
  });
}

namespace oracle {

Counts enumerate_counts(const BinaryMask& a, const BinaryMask& m) {
  using Key = std::tuple<std::size_t, std::size_t, std::size_t>;
  std::set<Key> sa, sm;
  const Dims& d = a.dims();
  for (std::size_t z = 0; z < d.nz; ++z)
    for (std::size_t y = 0; y < d.ny; ++y)
      for (std::size_t x = 0; x < d.nx; ++x) {
        if (a.contains(x, y, z)) sa.insert({x, y, z});
        if (m.contains(x, y, z)) sm.insert({x, y, z});
      }
  Counts c;
  for (const auto& k : sa) (sm.count(k) ? c.tp : c.fp) += 1;
  for (const auto& k : sm)
    if (!sa.count(k)) c.fn += 1;
  c.tn = d.voxel_count() - c.tp - c.fp - c.fn;
  return c;
}

std::vector<std::array<std::size_t, 3>> boundary_voxels(const BinaryMask& mask, int connectivity) {
  const Dims& d = mask.dims();
  std::vector<std::array<std::size_t, 3>> out;
  for (std::size_t z = 0; z < d.nz; ++z)
    for (std::size_t y = 0; y < d.ny; ++y)
      for (std::size_t x = 0; x < d.nx; ++x) {
        if (!mask.contains(x, y, z)) continue;
        bool boundary = false;
        for (int dz = -1; dz <= 1 && !boundary; ++dz)
          for (int dy = -1; dy <= 1 && !boundary; ++dy)
            for (int dx = -1; dx <= 1 && !boundary; ++dx) {
              const int manhattan = std::abs(dx) + std::abs(dy) + std::abs(dz);
              if (manhattan == 0 || (connectivity == 6 && manhattan != 1)) continue;
              const long nx = static_cast<long>(x) + dx, ny = static_cast<long>(y) + dy,
                         nz = static_cast<long>(z) + dz;
              if (nx < 0 || ny < 0 || nz < 0 || nx >= static_cast<long>(d.nx) ||
                  ny >= static_cast<long>(d.ny) || nz >= static_cast<long>(d.nz) ||
                  !mask.contains(static_cast<std::size_t>(nx), static_cast<std::size_t>(ny),
                                 static_cast<std::size_t>(nz)))
                boundary = true;
            }
        if (boundary) out.push_back({x, y, z});
      }
  return out;
}

}  // namespace oracle

std::filesystem::path write_synthetic_cohort(const std::filesystem::path& dir,
                                             const CohortOptions& o) {
  std::filesystem::create_directories(dir);
  std::mt19937_64 rng(o.seed);
  std::ostringstream manifest;
  manifest << "subject,method,structure,auto,manual,field_strength,label\n";
  const std::vector<std::string> sides =
      o.both_sides ? std::vector<std::string>{"left", "right"} : std::vector<std::string>{"left"};
  const double nx = static_cast<double>(o.dims.nx), ny = static_cast<double>(o.dims.ny),
               nz = static_cast<double>(o.dims.nz);
  for (std::size_t s = 0; s < o.subjects; ++s) {
    const std::string subject = "s" + std::to_string(1000 + s);
    std::string fs;
    if (o.tag_field_strength) fs = s < o.t1_5_subjects ? "1.5T" : "3T";
    for (const auto& side : sides) {
      std::uniform_real_distribution<double> jitter(-0.1, 0.1);
      const BinaryMask manual =
          ellipsoid(o.dims, o.spacing, nx * (0.5 + jitter(rng)), ny * (0.5 + jitter(rng)),
                    nz * (0.5 + jitter(rng)), nx * (0.2 + jitter(rng) / 2),
                    ny * (0.15 + jitter(rng) / 2), nz * (0.25 + jitter(rng) / 2));
      const std::string manual_name = subject + "_" + side + "_manual.nii.gz";
      write_mask(dir / manual_name, manual);
      for (std::size_t m = 0; m < o.methods.size(); ++m) {
        BinaryMask automatic = manual;
        if (!o.identity) {
          std::uniform_int_distribution<int> step(-1, 1);
          for (std::size_t k = 0; k < m; ++k) automatic = dilate6(automatic);
          automatic = shift(automatic, step(rng), step(rng), m == 0 ? 0 : step(rng));
          if (automatic.empty()) automatic = manual;
        }
        const std::string auto_name = subject + "_" + side + "_" + o.methods[m] + ".nii.gz";
        write_mask(dir / auto_name, automatic);
        manifest << subject << "," << o.methods[m] << "," << side << "," << auto_name << ","
                 << manual_name << "," << fs << ",\n";
      }
    }
  }
  const auto path = dir / "manifest.csv";
  std::ofstream out(path, std::ios::binary);
  out << manifest.str();
  return path;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace fixtures
