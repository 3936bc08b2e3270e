#pragma once

// Dense voxel grids, binary masks and the handful of morphology operations the
// generator needs. Every flat buffer uses the same order: x fastest, then y,
// then z, i.e. index = x + nx * (y + ny * z).

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "error.hpp"

namespace aforge {

using Label = std::uint8_t;

struct Index3 {
  int x = 0;
  int y = 0;
  int z = 0;

  friend auto operator<=>(const Index3&, const Index3&) = default;
  friend Index3 operator+(Index3 a, Index3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Index3 operator-(Index3 a, Index3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
  double& operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }
  double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
};

double distance(const Vec3& a, const Vec3& b);

struct Dims {
  int x = 0;
  int y = 0;
  int z = 0;

  friend bool operator==(const Dims&, const Dims&) = default;

  std::size_t count() const {
    return static_cast<std::size_t>(x) * static_cast<std::size_t>(y) * static_cast<std::size_t>(z);
  }
  bool valid() const { return x > 0 && y > 0 && z > 0; }
  bool contains(int i, int j, int k) const {
    return i >= 0 && j >= 0 && k >= 0 && i < x && j < y && k < z;
  }
  bool contains(Index3 p) const { return contains(p.x, p.y, p.z); }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(x) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(y) * static_cast<std::size_t>(k));
  }
  std::size_t index(Index3 p) const { return index(p.x, p.y, p.z); }
  Index3 coords(std::size_t flat) const {
    const auto nx = static_cast<std::size_t>(x);
    const auto ny = static_cast<std::size_t>(y);
    return {static_cast<int>(flat % nx), static_cast<int>((flat / nx) % ny), static_cast<int>(flat / (nx * ny))};
  }
  int operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
};

template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  explicit Grid(Dims dims, T fill = T{}) : dims_(dims), data_(dims.count(), fill) {
    if (!dims.valid()) throw Error(ErrorCode::kInvalidArgument, "grid dimensions must be positive");
  }
  Grid(Dims dims, std::vector<T> data) : dims_(dims), data_(std::move(data)) {
    if (!dims.valid() || data_.size() != dims.count())
      throw Error(ErrorCode::kInvalidArgument, "grid data length does not match dimensions");
  }

  const Dims& dims() const { return dims_; }
  std::size_t size() const { return data_.size(); }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }
  T& at(int i, int j, int k) { return data_[dims_.index(i, j, k)]; }
  const T& at(int i, int j, int k) const { return data_[dims_.index(i, j, k)]; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  Dims dims_;
  std::vector<T> data_;
};

using LabelGrid = Grid<Label>;
using IntensityGrid = Grid<float>;

// One byte per voxel in memory; the bank file stores masks bit-packed.
class BinaryMask {
 public:
  BinaryMask() = default;
  explicit BinaryMask(Dims dims);
  BinaryMask(Dims dims, std::vector<std::uint8_t> bits);

  const Dims& dims() const { return dims_; }
  bool get(int i, int j, int k) const { return bits_[dims_.index(i, j, k)] != 0; }
  bool get(Index3 p) const { return get(p.x, p.y, p.z); }
  void set(int i, int j, int k, bool v = true) { bits_[dims_.index(i, j, k)] = v ? 1 : 0; }
  void set(Index3 p, bool v = true) { set(p.x, p.y, p.z, v); }
  bool test(std::size_t flat) const { return bits_[flat] != 0; }
  void set_flat(std::size_t flat, bool v = true) { bits_[flat] = v ? 1 : 0; }

  std::size_t count() const;
  bool empty() const { return count() == 0; }
  std::span<const std::uint8_t> bits() const { return bits_; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  Dims dims_;
  std::vector<std::uint8_t> bits_;
};

// Inclusive voxel box.
struct BBox3 {
  Index3 min;
  Index3 max;

  friend bool operator==(const BBox3&, const BBox3&) = default;
  Dims extent() const { return {max.x - min.x + 1, max.y - min.y + 1, max.z - min.z + 1}; }
};

std::optional<BBox3> bounding_box(const BinaryMask& m);

// Copies `box` out of `m`, grown by `margin` voxels on every face. Regions
// outside `m` read as background, so the result always has the full margin.
BinaryMask crop(const BinaryMask& m, const BBox3& box, int margin);

// Tight crop plus `margin`; `origin` receives the position of the result's
// (0,0,0) voxel in the frame of `m`.
BinaryMask crop_to_content(const BinaryMask& m, int margin, Index3* origin = nullptr);

BinaryMask mask_of_class(const LabelGrid& grid, Label class_id);

// A connected component, tightly cropped; `origin` places the crop in the
// source grid.
struct Component {
  BinaryMask mask;
  Index3 origin;
  std::size_t voxels = 0;
};

// 26-connected components of the voxels equal to `class_id`, ordered by
// descending voxel count; ties keep scan order of each component's first
// voxel (lowest flat index first).
std::vector<Component> connected_components(const LabelGrid& grid, Label class_id);

// |a ∩ b| / |a ∪ b|. Throws on dimension mismatch or when both are empty.
double iou(const BinaryMask& a, const BinaryMask& b);

// Set voxels with at least one 6-neighbour outside the mask or off the grid.
BinaryMask boundary_voxels(const BinaryMask& m);

// The outer `thickness` layers of `m`: boundary peeled off repeatedly.
BinaryMask shell(const BinaryMask& m, int thickness);

// Writes `class_id` wherever `m` (placed at `offset`) lands inside `dst`.
// Voxels falling outside `dst` are clipped. Returns the number written.
std::size_t overlay(LabelGrid& dst, const BinaryMask& m, Index3 offset, Label class_id);

// Mean voxel coordinate of the set voxels, in the mask's own frame.
std::optional<Vec3> centroid(const BinaryMask& m);

// Voxel position scaled to [0,1]^3 by (dims - 1). Axes of size 1 map to 0.5.
Vec3 normalize(const Vec3& p, const Dims& dims);
Vec3 denormalize(const Vec3& p, const Dims& dims);

}  // namespace aforge
