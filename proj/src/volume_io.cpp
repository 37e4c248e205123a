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

#include "segeval/volume_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "segeval/error.hpp"

namespace segeval {

namespace {

std::string format_real(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << v;
  return os.str();
}

}  // namespace

std::string to_string(const Dims& d) {
  return "(" + std::to_string(d.nx) + "," + std::to_string(d.ny) + "," +
         std::to_string(d.nz) + ")";
}

std::string to_string(const Spacing& s) {
  return "(" + format_real(s.sx) + "," + format_real(s.sy) + "," +
         format_real(s.sz) + ")";
}

LabelVolume::LabelVolume(Dims dims, Spacing spacing, std::vector<double> data,
                         std::string source_path)
    : dims_(dims), spacing_(spacing), data_(std::move(data)),
      source_path_(std::move(source_path)) {
  if (dims_.nx == 0 || dims_.ny == 0 || dims_.nz == 0)
    throw Error(ErrorCode::InvalidArgument, "dimensions must be >= 1: " + to_string(dims_));
  if (!(spacing_.sx > 0) || !(spacing_.sy > 0) || !(spacing_.sz > 0))
    throw Error(ErrorCode::NonPositiveSpacing, to_string(spacing_));
  if (data_.size() != dims_.voxel_count())
    throw Error(ErrorCode::InvalidArgument, "data length does not match dimensions");
}

BinaryMask::BinaryMask(Dims dims, Spacing spacing, std::vector<std::uint8_t> bits)
    : dims_(dims), spacing_(spacing), bits_(std::move(bits)) {
  if (bits_.size() != dims_.voxel_count())
    throw Error(ErrorCode::InvalidArgument, "mask length does not match dimensions");
  for (auto& b : bits_) {
    b = b ? 1 : 0;
    count_ += b;
  }
}

bool BinarizeRule::holds(double v) const noexcept {
  switch (kind) {
    case Kind::Equals: return v == value;
    case Kind::GreaterThan: return v > value;
    case Kind::NonZero: return v != 0.0;
  }
  return false;
}

BinarizeRule parse_binarize_rule(const std::string& text) {
  if (text.empty() || text == "nonzero") return BinarizeRule::nonzero();
  std::string_view body = text;
  bool greater = false;
  if (body.front() == '>') {
    greater = true;
    body.remove_prefix(1);
  } else if (body.front() == '=') {
    body.remove_prefix(1);
  }
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
  if (ec != std::errc() || ptr != body.data() + body.size())
    throw Error(ErrorCode::InvalidArgument, "bad binarization rule '" + text + "'");
  return greater ? BinarizeRule::greater_than(v) : BinarizeRule::equals(v);
}

std::string to_string(const BinarizeRule& rule) {
  switch (rule.kind) {
    case BinarizeRule::Kind::Equals: return "=" + format_real(rule.value);
    case BinarizeRule::Kind::GreaterThan: return ">" + format_real(rule.value);
    case BinarizeRule::Kind::NonZero: return "nonzero";
  }
  return "nonzero";
}

namespace {

enum class Datatype { UInt8, Int16, Int32, Float32, Float64 };

std::size_t datatype_size(Datatype t) {
  switch (t) {
    case Datatype::UInt8: return 1;
    case Datatype::Int16: return 2;
    case Datatype::Int32: return 4;
    case Datatype::Float32: return 4;
    case Datatype::Float64: return 8;
  }
  return 1;
}

template <typename T>
T read_scalar(const std::uint8_t* p, bool swap) {
  std::array<std::uint8_t, sizeof(T)> buf;
  std::memcpy(buf.data(), p, sizeof(T));
  if (swap) std::reverse(buf.begin(), buf.end());
  T v;
  std::memcpy(&v, buf.data(), sizeof(T));
  return v;
}

std::vector<double> decode_payload(std::span<const std::uint8_t> payload, Datatype type,
                                   std::size_t count, bool swap, double slope,
                                   double inter) {
  std::vector<double> out(count);
  const std::size_t stride = datatype_size(type);
  const bool scale = slope != 0.0 && std::isfinite(slope);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint8_t* p = payload.data() + i * stride;
    double v = 0.0;
    switch (type) {
      case Datatype::UInt8: v = *p; break;
      case Datatype::Int16: v = read_scalar<std::int16_t>(p, swap); break;
      case Datatype::Int32: v = read_scalar<std::int32_t>(p, swap); break;
      case Datatype::Float32: v = read_scalar<float>(p, swap); break;
      case Datatype::Float64: v = read_scalar<double>(p, swap); break;
    }
    out[i] = scale ? v * slope + inter : v;
  }
  return out;
}

bool is_gzip(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 2 && bytes[0] == 0x1F && bytes[1] == 0x8B;
}

std::vector<std::uint8_t> gunzip(std::span<const std::uint8_t> bytes,
                                 const std::string& source) {
  z_stream zs{};
  if (inflateInit2(&zs, 15 + 32) != Z_OK)
    throw Error(ErrorCode::IoError, "zlib initialisation failed");
  zs.next_in = const_cast<Bytef*>(bytes.data());
  zs.avail_in = static_cast<uInt>(bytes.size());
  std::vector<std::uint8_t> out;
  std::array<std::uint8_t, 1 << 16> chunk;
  int rc = Z_OK;
  do {
    zs.next_out = chunk.data();
    zs.avail_out = static_cast<uInt>(chunk.size());
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw Error(ErrorCode::CorruptFile, "gzip stream damaged in " + source);
    }
    out.insert(out.end(), chunk.data(), chunk.data() + (chunk.size() - zs.avail_out));
  } while (rc != Z_STREAM_END && (zs.avail_in > 0 || zs.avail_out == 0));
  inflateEnd(&zs);
  if (rc != Z_STREAM_END)
    throw Error(ErrorCode::CorruptFile, "gzip stream truncated in " + source);
  return out;
}

constexpr std::size_t kNiftiHeaderSize = 348;

Datatype nifti_datatype(std::int16_t code, const std::string& source) {
  switch (code) {
    case 2: return Datatype::UInt8;
    case 4: return Datatype::Int16;
    case 8: return Datatype::Int32;
    case 16: return Datatype::Float32;
    case 64: return Datatype::Float64;
    default:
      throw Error(ErrorCode::UnsupportedDatatype,
                  "NIfTI datatype " + std::to_string(code) + " in " + source);
  }
}

LabelVolume decode_nifti(std::span<const std::uint8_t> bytes, bool swap,
                         const std::string& source) {
  if (bytes.size() < kNiftiHeaderSize)
    throw Error(ErrorCode::CorruptFile, "NIfTI header truncated in " + source);
  const std::uint8_t* h = bytes.data();
  const char* magic = reinterpret_cast<const char*>(h + 344);
  if (std::memcmp(magic, "ni1", 4) == 0)
    throw Error(ErrorCode::UnsupportedFormat,
                "two-file NIfTI (hdr/img pair) is not supported: " + source);
  if (std::memcmp(magic, "n+1", 4) != 0)
    throw Error(ErrorCode::UnsupportedFormat, "missing NIfTI-1 magic in " + source);

  std::array<std::int16_t, 8> dim{};
  for (int i = 0; i < 8; ++i) dim[i] = read_scalar<std::int16_t>(h + 40 + 2 * i, swap);
  const int rank = dim[0];
  if (rank < 1 || rank > 7)
    throw Error(ErrorCode::CorruptFile, "invalid NIfTI rank " + std::to_string(rank));
  std::array<std::size_t, 7> extent{1, 1, 1, 1, 1, 1, 1};
  for (int i = 1; i <= rank; ++i) {
    if (dim[i] < 1)
      throw Error(ErrorCode::CorruptFile, "non-positive NIfTI dimension in " + source);
    extent[i - 1] = static_cast<std::size_t>(dim[i]);
  }
  for (int i = 3; i < 7; ++i)
    if (extent[i] != 1)
      throw Error(ErrorCode::UnsupportedFormat,
                  "volume has more than three non-singleton dimensions: " + source);

  const Datatype type = nifti_datatype(read_scalar<std::int16_t>(h + 70, swap), source);
  std::array<double, 3> pix{1.0, 1.0, 1.0};
  for (int i = 0; i < std::min(rank, 3); ++i) {
    pix[i] = read_scalar<float>(h + 76 + 4 * (i + 1), swap);
    if (!(pix[i] > 0)) throw Error(ErrorCode::NonPositiveSpacing, "pixdim in " + source);
  }
  const double vox_offset = read_scalar<float>(h + 108, swap);
  const double slope = read_scalar<float>(h + 112, swap);
  const double inter = read_scalar<float>(h + 116, swap);

  const Dims dims{extent[0], extent[1], extent[2]};
  const std::size_t offset = vox_offset < 352 ? 352 : static_cast<std::size_t>(vox_offset);
  const std::size_t need = dims.voxel_count() * datatype_size(type);
  if (bytes.size() < offset || bytes.size() - offset < need)
    throw Error(ErrorCode::CorruptFile, "payload shorter than header promises in " + source);
  // float32 pixdim widened to double keeps e.g. 0.781f as 0.78100001...;
  // round to 7 significant digits so spacing reads back as written.
  auto widen = [](double v) {
    const double mag = std::pow(10.0, 6 - std::floor(std::log10(v)));
    return std::round(v * mag) / mag;
  };
  return LabelVolume(dims, Spacing{widen(pix[0]), widen(pix[1]), widen(pix[2])},
                     decode_payload(bytes.subspan(offset, need), type, dims.voxel_count(),
                                    swap, slope, inter),
                     source);
}

Datatype rawvol_datatype(const std::string& name, const std::string& source) {
  if (name == "uint8") return Datatype::UInt8;
  if (name == "int16") return Datatype::Int16;
  if (name == "int32") return Datatype::Int32;
  if (name == "float32") return Datatype::Float32;
  if (name == "float64") return Datatype::Float64;
  throw Error(ErrorCode::UnsupportedDatatype, "rawvol datatype '" + name + "' in " + source);
}

LabelVolume decode_rawvol(std::span<const std::uint8_t> bytes, const std::string& source) {
  std::size_t pos = 0;
  auto next_line = [&]() -> std::string {
    const auto* begin = bytes.data() + pos;
    const auto* end = bytes.data() + bytes.size();
    const auto* nl = std::find(begin, end, std::uint8_t('\n'));
    if (nl == end) throw Error(ErrorCode::CorruptFile, "rawvol header truncated in " + source);
    pos += static_cast<std::size_t>(nl - begin) + 1;
    return std::string(begin, nl);
  };
  if (next_line() != "RAWVOL 1")
    throw Error(ErrorCode::UnsupportedFormat, "unknown rawvol version in " + source);

  Dims dims{0, 0, 0};
  Spacing spacing{0, 0, 0};
  std::string type_name;
  bool big_endian = false;
  for (;;) {
    const std::string line = next_line();
    if (line == "data") break;
    std::istringstream is(line);
    is.imbue(std::locale::classic());
    std::string key;
    is >> key;
    if (key == "dims") {
      is >> dims.nx >> dims.ny >> dims.nz;
    } else if (key == "spacing") {
      is >> spacing.sx >> spacing.sy >> spacing.sz;
    } else if (key == "datatype") {
      is >> type_name;
    } else if (key == "endian") {
      std::string e;
      is >> e;
      if (e != "little" && e != "big")
        throw Error(ErrorCode::CorruptFile, "bad endian value in " + source);
      big_endian = e == "big";
    } else {
      throw Error(ErrorCode::CorruptFile, "unknown rawvol key '" + key + "' in " + source);
    }
    if (is.fail()) throw Error(ErrorCode::CorruptFile, "bad rawvol line '" + line + "'");
  }
  if (dims.voxel_count() == 0)
    throw Error(ErrorCode::CorruptFile, "rawvol dims missing in " + source);
  if (!(spacing.sx > 0) || !(spacing.sy > 0) || !(spacing.sz > 0))
    throw Error(ErrorCode::NonPositiveSpacing, to_string(spacing) + " in " + source);
  const Datatype type = rawvol_datatype(type_name, source);
  const std::size_t need = dims.voxel_count() * datatype_size(type);
  if (bytes.size() - pos < need)
    throw Error(ErrorCode::CorruptFile, "payload shorter than header promises in " + source);
  const bool swap = big_endian != (std::endian::native == std::endian::big);
  return LabelVolume(dims, spacing,
                     decode_payload(bytes.subspan(pos, need), type, dims.voxel_count(), swap,
                                    0.0, 0.0),
                     source);
}

}  // namespace

LabelVolume decode_volume(std::span<const std::uint8_t> bytes, const std::string& source_path) {
  if (is_gzip(bytes)) {
    const auto plain = gunzip(bytes, source_path);
    return decode_volume(plain, source_path);
  }
  if (bytes.size() >= 4) {
    const auto le = read_scalar<std::int32_t>(bytes.data(), std::endian::native != std::endian::little);
    const auto be = read_scalar<std::int32_t>(bytes.data(), std::endian::native != std::endian::big);
    if (le == static_cast<std::int32_t>(kNiftiHeaderSize))
      return decode_nifti(bytes, std::endian::native != std::endian::little, source_path);
    if (be == static_cast<std::int32_t>(kNiftiHeaderSize))
      return decode_nifti(bytes, std::endian::native != std::endian::big, source_path);
  }
  static constexpr std::string_view kRawMagic = "RAWVOL";
  if (bytes.size() >= kRawMagic.size() &&
      std::equal(kRawMagic.begin(), kRawMagic.end(), bytes.begin()))
    return decode_rawvol(bytes, source_path);
  throw Error(ErrorCode::UnsupportedFormat, "unrecognised file magic: " + source_path);
}

LabelVolume load_volume(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoError, "read failed for " + path.string());
  return decode_volume(bytes, path.string());
}

BinaryMask binarize(const LabelVolume& vol, const BinarizeRule& rule) {
  const auto data = vol.data();
  std::vector<std::uint8_t> bits(data.size());
  std::transform(data.begin(), data.end(), bits.begin(),
                 [&](double v) { return static_cast<std::uint8_t>(rule.holds(v)); });
  return BinaryMask(vol.dims(), vol.spacing(), std::move(bits));
}

CompatibilityReport check_compatible(const BinaryMask& a, const BinaryMask& m) {
  CompatibilityReport report{a.dims(), m.dims(), a.spacing(), m.spacing()};
  if (a.dims() != m.dims())
    throw Error(ErrorCode::GridMismatch, to_string(a.dims()) + " vs " + to_string(m.dims()));
  const std::array<double, 3> sa{a.spacing().sx, a.spacing().sy, a.spacing().sz};
  const std::array<double, 3> sm{m.spacing().sx, m.spacing().sy, m.spacing().sz};
  for (int i = 0; i < 3; ++i) {
    const double rel = std::abs(sa[i] - sm[i]) / std::max(sa[i], sm[i]);
    if (rel > kSpacingRelTolerance)
      throw Error(ErrorCode::SpacingMismatch,
                  to_string(a.spacing()) + " vs " + to_string(m.spacing()));
  }
  return report;
}

}  // namespace segeval
