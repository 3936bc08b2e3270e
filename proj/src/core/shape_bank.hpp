#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rng.hpp"
#include "volume.hpp"

namespace aforge {

// A label volume together with an opaque subject identifier.
struct LabeledSource {
  std::string id;
  LabelGrid labels;
};

// Bijection between raw source labels and the contiguous ids 1..C.
// Ids are handed out in ascending raw-label order.
class ClassMap {
 public:
  ClassMap() = default;
  explicit ClassMap(std::vector<Label> raw_labels);

  int size() const { return static_cast<int>(raw_by_id_.size()); }
  Label raw_of(Label id) const;
  std::optional<Label> id_of(Label raw) const;
  std::span<const Label> raw_labels() const { return raw_by_id_; }

  friend bool operator==(const ClassMap&, const ClassMap&) = default;

 private:
  std::vector<Label> raw_by_id_;  // index id - 1
};

struct ShapeEntry {
  Label class_id = 0;
  Label raw_class = 0;
  std::string source_id;
  BinaryMask mask;  // tight crop plus a one-voxel background margin

  friend bool operator==(const ShapeEntry&, const ShapeEntry&) = default;
};

struct AugmentParams {
  double flip_prob = 0.5;
  bool rotation_enabled = true;
  double scale_lo = 0.85;
  double scale_hi = 1.25;

  void validate() const;
  static AugmentParams identity() { return {0.0, false, 1.0, 1.0}; }
};

class ShapeBank {
 public:
  ShapeBank() = default;
  ShapeBank(ClassMap class_map, std::vector<ShapeEntry> entries);

  int class_count() const { return class_map_.size(); }
  const ClassMap& class_map() const { return class_map_; }
  const std::vector<ShapeEntry>& entries() const { return entries_; }
  // Indices into entries() for one class, in insertion order.
  const std::vector<std::size_t>& entries_of(Label class_id) const;
  double mean_voxels(Label class_id) const;

  friend bool operator==(const ShapeBank& a, const ShapeBank& b) {
    return a.class_map_ == b.class_map_ && a.entries_ == b.entries_;
  }

 private:
  ClassMap class_map_;
  std::vector<ShapeEntry> entries_;
  std::vector<std::vector<std::size_t>> by_class_;
};

inline constexpr std::size_t kDefaultMinComponent = 8;
inline constexpr int kCropMargin = 1;

ShapeBank build_bank(std::span<const LabeledSource> sources, std::span<const Label> selected_raw_classes,
                     std::size_t min_component = kDefaultMinComponent);

// The 24 proper axis-aligned rotations, each as (permutation, signs):
// output axis a reads input axis perm[a], reversed when sign[a] < 0.
struct AxisRotation {
  int perm[3];
  int sign[3];
};
const std::vector<AxisRotation>& axis_rotations();

BinaryMask flip(const BinaryMask& m, int axis);
BinaryMask rotate(const BinaryMask& m, const AxisRotation& r);
// Nearest-neighbour isotropic rescale; each output extent is round(extent * f).
BinaryMask rescale(const BinaryMask& m, double factor);

// Flip per axis, then one of the 24 rotations, then isotropic rescale. The
// output is re-cropped to its content plus a one-voxel margin. A rescale that
// would empty the mask is skipped.
BinaryMask augment(const ShapeEntry& entry, const AugmentParams& params, Rng& rng);

BinaryMask sample_shape(const ShapeBank& bank, Label class_id, const AugmentParams& params, Rng& rng);

// Binary .bank file: header, class map, then per entry its dims and the
// bit-packed mask (LSB first). All integers little-endian.
std::vector<std::uint8_t> encode_bank(const ShapeBank& bank);
ShapeBank decode_bank(std::span<const std::uint8_t> bytes);
void save_bank(const ShapeBank& bank, const std::string& path);
ShapeBank load_bank(const std::string& path);

// Plaintext sidecar: one `raw_label class_id [name] entries` row per class.
std::string format_class_map(const ShapeBank& bank, std::span<const std::string> names = {});

}  // namespace aforge
