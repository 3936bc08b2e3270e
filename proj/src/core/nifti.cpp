#include "nifti.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>

#include "byteio.hpp"

namespace aforge {

namespace {

template <typename T>
T load(std::span<const std::uint8_t> b, std::size_t off) {
  T v;
  std::memcpy(&v, b.data() + off, sizeof(T));
  return v;
}

template <typename T>
void store(std::vector<std::uint8_t>& b, std::size_t off, T v) {
  std::memcpy(b.data() + off, &v, sizeof(T));
}

// Header byte offsets.
constexpr std::size_t kSizeofHdr = 0, kDim = 40, kDatatype = 70, kBitpix = 72, kPixdim = 76, kVoxOffset = 108,
                      kSclSlope = 112, kSclInter = 116, kXyztUnits = 123, kDescrip = 148, kQformCode = 252,
                      kSformCode = 254, kQuatern = 256, kSrow = 280, kMagic = 344;

std::size_t bytes_per_voxel(NiftiDatatype t) {
  switch (t) {
    case NiftiDatatype::kUint8: return 1;
    case NiftiDatatype::kInt16: return 2;
    case NiftiDatatype::kFloat32: return 4;
  }
  return 0;
}

template <typename T>
Grid<T> payload_grid(std::span<const std::uint8_t> bytes, std::size_t offset, const Dims& dims) {
  std::vector<T> values(dims.count());
  std::memcpy(values.data(), bytes.data() + offset, values.size() * sizeof(T));
  return Grid<T>(dims, std::move(values));
}

std::vector<std::uint8_t> gunzip(const std::string& path) {
  gzFile f = gzopen(path.c_str(), "rb");
  if (!f) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::vector<std::uint8_t> out;
  std::uint8_t buf[1 << 16];
  for (;;) {
    const int n = gzread(f, buf, sizeof(buf));
    if (n < 0) {
      gzclose(f);
      throw Error(ErrorCode::kFormat, "corrupt gzip stream in '" + path + "'");
    }
    if (n == 0) break;
    out.insert(out.end(), buf, buf + n);
  }
  gzclose(f);
  return out;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

NiftiDatatype NiftiVolume::datatype() const {
  switch (data.index()) {
    case 0: return NiftiDatatype::kUint8;
    case 1: return NiftiDatatype::kInt16;
    default: return NiftiDatatype::kFloat32;
  }
}

const Dims& NiftiVolume::dims() const {
  return std::visit([](const auto& g) -> const Dims& { return g.dims(); }, data);
}

NiftiVolume decode_nifti(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kNiftiHeaderSize) throw Error(ErrorCode::kFormat, "truncated NIfTI header");
  const std::int32_t sizeof_hdr = load<std::int32_t>(bytes, kSizeofHdr);
  if (sizeof_hdr != 348) {
    if (sizeof_hdr == 0x5c010000) throw Error(ErrorCode::kFormat, "big-endian NIfTI is not supported");
    throw Error(ErrorCode::kFormat, "not a NIfTI-1 file (sizeof_hdr != 348)");
  }
  const char* magic = reinterpret_cast<const char*>(bytes.data() + kMagic);
  if (std::memcmp(magic, "ni1\0", 4) == 0) throw Error(ErrorCode::kFormat, "unsupported two-file NIfTI (ni1)");
  if (std::memcmp(magic, "n+1\0", 4) != 0) throw Error(ErrorCode::kFormat, "bad NIfTI magic");

  std::int16_t dim[8];
  for (int i = 0; i < 8; ++i) dim[i] = load<std::int16_t>(bytes, kDim + 2 * i);
  if (dim[0] < 3 || dim[0] > 7) throw Error(ErrorCode::kFormat, "NIfTI volume must be 3D");
  for (int i = 4; i <= dim[0]; ++i)
    if (dim[i] != 1) throw Error(ErrorCode::kFormat, "NIfTI volume must be 3D (extra dimensions present)");
  const Dims dims{dim[1], dim[2], dim[3]};
  if (!dims.valid()) throw Error(ErrorCode::kFormat, "NIfTI dimensions must be positive");

  const std::int16_t dt = load<std::int16_t>(bytes, kDatatype);
  if (dt != 2 && dt != 4 && dt != 16)
    throw Error(ErrorCode::kFormat, "unsupported NIfTI datatype " + std::to_string(dt));
  const auto type = static_cast<NiftiDatatype>(dt);

  const float vox_offset = load<float>(bytes, kVoxOffset);
  if (!(vox_offset >= static_cast<float>(kNiftiVoxOffset)) || vox_offset != std::floor(vox_offset))
    throw Error(ErrorCode::kFormat, "invalid vox_offset");
  const auto offset = static_cast<std::size_t>(vox_offset);
  const std::size_t payload = dims.count() * bytes_per_voxel(type);
  if (bytes.size() < offset || bytes.size() - offset < payload)
    throw Error(ErrorCode::kFormat, "truncated NIfTI payload");

  NiftiVolume vol;
  switch (type) {
    case NiftiDatatype::kUint8: vol.data = payload_grid<std::uint8_t>(bytes, offset, dims); break;
    case NiftiDatatype::kInt16: vol.data = payload_grid<std::int16_t>(bytes, offset, dims); break;
    case NiftiDatatype::kFloat32: vol.data = payload_grid<float>(bytes, offset, dims); break;
  }
  for (int i = 0; i < 8; ++i) vol.spatial.pixdim[i] = load<float>(bytes, kPixdim + 4 * i);
  vol.spatial.qform_code = load<std::int16_t>(bytes, kQformCode);
  vol.spatial.sform_code = load<std::int16_t>(bytes, kSformCode);
  for (int i = 0; i < 6; ++i) vol.spatial.quatern[i] = load<float>(bytes, kQuatern + 4 * i);
  for (int i = 0; i < 12; ++i) vol.spatial.srow[i] = load<float>(bytes, kSrow + 4 * i);
  vol.spatial.xyzt_units = bytes[kXyztUnits];
  vol.scl_slope = load<float>(bytes, kSclSlope);
  vol.scl_inter = load<float>(bytes, kSclInter);
  return vol;
}

std::vector<std::uint8_t> encode_nifti(const NiftiVolume& vol) {
  const Dims d = vol.dims();
  if (d.x > 32767 || d.y > 32767 || d.z > 32767) throw Error(ErrorCode::kInvalidArgument, "dimension too large for NIfTI-1");
  const NiftiDatatype type = vol.datatype();
  const std::size_t bpv = bytes_per_voxel(type);
  std::vector<std::uint8_t> out(kNiftiVoxOffset + d.count() * bpv, 0);

  store<std::int32_t>(out, kSizeofHdr, 348);
  const std::int16_t dim[8] = {3, static_cast<std::int16_t>(d.x), static_cast<std::int16_t>(d.y),
                               static_cast<std::int16_t>(d.z), 1, 1, 1, 1};
  for (int i = 0; i < 8; ++i) store<std::int16_t>(out, kDim + 2 * i, dim[i]);
  store<std::int16_t>(out, kDatatype, static_cast<std::int16_t>(type));
  store<std::int16_t>(out, kBitpix, static_cast<std::int16_t>(8 * bpv));
  for (int i = 0; i < 8; ++i) store<float>(out, kPixdim + 4 * i, vol.spatial.pixdim[i]);
  store<float>(out, kVoxOffset, static_cast<float>(kNiftiVoxOffset));
  store<float>(out, kSclSlope, vol.scl_slope);
  store<float>(out, kSclInter, vol.scl_inter);
  out[kXyztUnits] = vol.spatial.xyzt_units;
  std::memcpy(out.data() + kDescrip, kNiftiDescription, sizeof(kNiftiDescription) - 1);
  store<std::int16_t>(out, kQformCode, vol.spatial.qform_code);
  store<std::int16_t>(out, kSformCode, vol.spatial.sform_code);
  for (int i = 0; i < 6; ++i) store<float>(out, kQuatern + 4 * i, vol.spatial.quatern[i]);
  for (int i = 0; i < 12; ++i) store<float>(out, kSrow + 4 * i, vol.spatial.srow[i]);
  std::memcpy(out.data() + kMagic, "n+1\0", 4);
  // Bytes 348..351: empty extension block.

  std::visit(
      [&](const auto& g) {
        const auto values = g.values();
        std::memcpy(out.data() + kNiftiVoxOffset, values.data(), values.size_bytes());
      },
      vol.data);
  return out;
}

NiftiVolume read_nifti(const std::string& path) {
  try {
    return decode_nifti(gunzip(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo) throw;
    throw Error(e.code(), path + ": " + e.what());
  }
}

void write_nifti(const NiftiVolume& vol, const std::string& path) {
  const auto bytes = encode_nifti(vol);
  if (!ends_with(path, ".gz")) {
    write_file_bytes(path, bytes);
    return;
  }
  gzFile f = gzopen(path.c_str(), "wb6");
  if (!f) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  const int n = gzwrite(f, bytes.data(), static_cast<unsigned>(bytes.size()));
  const int rc = gzclose(f);
  if (n != static_cast<int>(bytes.size()) || rc != Z_OK) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

LabelGrid to_label_grid(const NiftiVolume& vol) {
  if (const auto* g = std::get_if<Grid<std::uint8_t>>(&vol.data)) return *g;
  if (const auto* g = std::get_if<Grid<std::int16_t>>(&vol.data)) {
    std::vector<Label> values(g->size());
    for (std::size_t i = 0; i < g->size(); ++i) {
      const std::int16_t v = (*g)[i];
      if (v < 0 || v > 255) throw Error(ErrorCode::kData, "label value " + std::to_string(v) + " outside 0..255");
      values[i] = static_cast<Label>(v);
    }
    return LabelGrid(g->dims(), std::move(values));
  }
  throw Error(ErrorCode::kData, "expected an integer label volume, got float32");
}

IntensityGrid to_intensity_grid(const NiftiVolume& vol) {
  const auto* g = std::get_if<Grid<float>>(&vol.data);
  if (!g) throw Error(ErrorCode::kData, "expected a float32 intensity volume");
  if (vol.scl_slope == 0.0f) return *g;
  IntensityGrid out = *g;
  for (auto& v : out.values()) v = v * vol.scl_slope + vol.scl_inter;
  return out;
}

NiftiVolume make_label_volume(LabelGrid grid) {
  NiftiVolume v;
  v.data = std::move(grid);
  return v;
}

NiftiVolume make_intensity_volume(IntensityGrid grid) {
  NiftiVolume v;
  v.data = std::move(grid);
  v.scl_slope = 1.0f;
  return v;
}

}  // namespace aforge
