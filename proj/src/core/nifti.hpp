#pragma once

// Single-file NIfTI-1 (.nii, optionally gzip-compressed) for 3D volumes of
// uint8, int16 or float32. Only little-endian files are handled.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "volume.hpp"

namespace aforge {

enum class NiftiDatatype : std::int16_t { kUint8 = 2, kInt16 = 4, kFloat32 = 16 };

// Orientation and spacing fields, carried through untouched. The generator
// itself never uses them.
struct NiftiSpatial {
  std::array<float, 8> pixdim{1.0f, 1.0f, 1.0f, 1.0f, 0.0f, 0.0f, 0.0f, 0.0f};
  std::int16_t qform_code = 0;
  std::int16_t sform_code = 2;
  std::array<float, 6> quatern{};  // b, c, d, qoffset_x, qoffset_y, qoffset_z
  std::array<float, 12> srow{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0};
  std::uint8_t xyzt_units = 2;  // millimetres

  friend bool operator==(const NiftiSpatial&, const NiftiSpatial&) = default;
};

struct NiftiVolume {
  std::variant<Grid<std::uint8_t>, Grid<std::int16_t>, Grid<float>> data;
  NiftiSpatial spatial;
  float scl_slope = 0.0f;
  float scl_inter = 0.0f;

  NiftiDatatype datatype() const;
  const Dims& dims() const;

  friend bool operator==(const NiftiVolume&, const NiftiVolume&) = default;
};

inline constexpr std::size_t kNiftiHeaderSize = 348;
inline constexpr std::size_t kNiftiVoxOffset = 352;
inline constexpr char kNiftiDescription[] = "anatomy-forge";

NiftiVolume decode_nifti(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_nifti(const NiftiVolume& vol);

// Reads .nii or gzip-compressed .nii.gz (detected from content).
NiftiVolume read_nifti(const std::string& path);
// Gzip-compresses when `path` ends in ".gz".
void write_nifti(const NiftiVolume& vol, const std::string& path);

// Integer volumes only; every value must fit in 0..255.
LabelGrid to_label_grid(const NiftiVolume& vol);
// Float volumes only; applies scl_slope/scl_inter when slope is non-zero.
IntensityGrid to_intensity_grid(const NiftiVolume& vol);

// Volumes with 1 mm isotropic spacing and identity orientation.
NiftiVolume make_label_volume(LabelGrid grid);
NiftiVolume make_intensity_volume(IntensityGrid grid);

}  // namespace aforge
