#include "volume.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace aforge {

double distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

BinaryMask::BinaryMask(Dims dims) : dims_(dims), bits_(dims.count(), 0) {
  if (!dims.valid()) throw Error(ErrorCode::kInvalidArgument, "mask dimensions must be positive");
}

BinaryMask::BinaryMask(Dims dims, std::vector<std::uint8_t> bits) : dims_(dims), bits_(std::move(bits)) {
  if (!dims.valid() || bits_.size() != dims.count())
    throw Error(ErrorCode::kInvalidArgument, "mask data length does not match dimensions");
  for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::optional<BBox3> bounding_box(const BinaryMask& m) {
  const Dims& d = m.dims();
  BBox3 box{{d.x, d.y, d.z}, {-1, -1, -1}};
  bool any = false;
  for (int k = 0; k < d.z; ++k)
    for (int j = 0; j < d.y; ++j)
      for (int i = 0; i < d.x; ++i) {
        if (!m.get(i, j, k)) continue;
        any = true;
        box.min = {std::min(box.min.x, i), std::min(box.min.y, j), std::min(box.min.z, k)};
        box.max = {std::max(box.max.x, i), std::max(box.max.y, j), std::max(box.max.z, k)};
      }
  if (!any) return std::nullopt;
  return box;
}

BinaryMask crop(const BinaryMask& m, const BBox3& box, int margin) {
  const Index3 lo = box.min - Index3{margin, margin, margin};
  const Dims ext = box.extent();
  const Dims out_dims{ext.x + 2 * margin, ext.y + 2 * margin, ext.z + 2 * margin};
  BinaryMask out(out_dims);
  for (int k = 0; k < out_dims.z; ++k)
    for (int j = 0; j < out_dims.y; ++j)
      for (int i = 0; i < out_dims.x; ++i) {
        const Index3 src = lo + Index3{i, j, k};
        if (m.dims().contains(src) && m.get(src)) out.set(i, j, k);
      }
  return out;
}

BinaryMask crop_to_content(const BinaryMask& m, int margin, Index3* origin) {
  const auto box = bounding_box(m);
  if (!box) throw Error(ErrorCode::kInvalidArgument, "cannot crop an empty mask");
  if (origin) *origin = box->min - Index3{margin, margin, margin};
  return crop(m, *box, margin);
}

BinaryMask mask_of_class(const LabelGrid& grid, Label class_id) {
  BinaryMask out(grid.dims());
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] == class_id) out.set_flat(i);
  return out;
}

std::vector<Component> connected_components(const LabelGrid& grid, Label class_id) {
  const Dims d = grid.dims();
  std::vector<std::uint8_t> visited(d.count(), 0);
  std::vector<Component> out;
  std::vector<std::size_t> members;
  std::deque<std::size_t> queue;

  for (std::size_t seed = 0; seed < grid.size(); ++seed) {
    if (grid[seed] != class_id || visited[seed]) continue;
    members.clear();
    visited[seed] = 1;
    queue.push_back(seed);
    BBox3 box{d.coords(seed), d.coords(seed)};
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      members.push_back(cur);
      const Index3 p = d.coords(cur);
      box.min = {std::min(box.min.x, p.x), std::min(box.min.y, p.y), std::min(box.min.z, p.z)};
      box.max = {std::max(box.max.x, p.x), std::max(box.max.y, p.y), std::max(box.max.z, p.z)};
      for (int dz = -1; dz <= 1; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const Index3 q{p.x + dx, p.y + dy, p.z + dz};
            if (!d.contains(q)) continue;
            const std::size_t qi = d.index(q);
            if (visited[qi] || grid[qi] != class_id) continue;
            visited[qi] = 1;
            queue.push_back(qi);
          }
    }
    Component c{BinaryMask(box.extent()), box.min, members.size()};
    for (const std::size_t flat : members) c.mask.set(d.coords(flat) - box.min);
    out.push_back(std::move(c));
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const Component& a, const Component& b) { return a.voxels > b.voxels; });
  return out;
}

double iou(const BinaryMask& a, const BinaryMask& b) {
  if (!(a.dims() == b.dims())) throw Error(ErrorCode::kInvalidArgument, "iou: mask dimensions differ");
  std::size_t inter = 0;
  std::size_t uni = 0;
  const auto ab = a.bits();
  const auto bb = b.bits();
  for (std::size_t i = 0; i < ab.size(); ++i) {
    inter += static_cast<std::size_t>(ab[i] & bb[i]);
    uni += static_cast<std::size_t>(ab[i] | bb[i]);
  }
  if (uni == 0) throw Error(ErrorCode::kInvalidArgument, "iou: both masks are empty");
  return static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

constexpr Index3 kFaceNeighbours[6] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};

bool exposed(const BinaryMask& m, Index3 p) {
  for (const Index3& n : kFaceNeighbours) {
    const Index3 q = p + n;
    if (!m.dims().contains(q) || !m.get(q)) return true;
  }
  return false;
}

}  // namespace

BinaryMask boundary_voxels(const BinaryMask& m) {
  const Dims d = m.dims();
  BinaryMask out(d);
  for (int k = 0; k < d.z; ++k)
    for (int j = 0; j < d.y; ++j)
      for (int i = 0; i < d.x; ++i)
        if (m.get(i, j, k) && exposed(m, {i, j, k})) out.set(i, j, k);
  return out;
}

BinaryMask shell(const BinaryMask& m, int thickness) {
  if (thickness < 1) throw Error(ErrorCode::kInvalidArgument, "shell thickness must be >= 1");
  BinaryMask remaining = m;
  BinaryMask out(m.dims());
  for (int layer = 0; layer < thickness; ++layer) {
    const BinaryMask edge = boundary_voxels(remaining);
    bool any = false;
    for (std::size_t i = 0; i < edge.bits().size(); ++i) {
      if (!edge.test(i)) continue;
      any = true;
      out.set_flat(i);
      remaining.set_flat(i, false);
    }
    if (!any) break;
  }
  return out;
}

std::size_t overlay(LabelGrid& dst, const BinaryMask& m, Index3 offset, Label class_id) {
  const Dims d = m.dims();
  const Dims g = dst.dims();
  // Restrict the walk to the part of `m` that can land inside `dst`.
  const int i0 = std::max(0, -offset.x), i1 = std::min(d.x, g.x - offset.x);
  const int j0 = std::max(0, -offset.y), j1 = std::min(d.y, g.y - offset.y);
  const int k0 = std::max(0, -offset.z), k1 = std::min(d.z, g.z - offset.z);
  std::size_t written = 0;
  for (int k = k0; k < k1; ++k)
    for (int j = j0; j < j1; ++j)
      for (int i = i0; i < i1; ++i) {
        if (!m.get(i, j, k)) continue;
        dst.at(i + offset.x, j + offset.y, k + offset.z) = class_id;
        ++written;
      }
  return written;
}

std::optional<Vec3> centroid(const BinaryMask& m) {
  const Dims d = m.dims();
  long double sx = 0, sy = 0, sz = 0;
  std::size_t n = 0;
  for (int k = 0; k < d.z; ++k)
    for (int j = 0; j < d.y; ++j)
      for (int i = 0; i < d.x; ++i)
        if (m.get(i, j, k)) {
          sx += i;
          sy += j;
          sz += k;
          ++n;
        }
  if (n == 0) return std::nullopt;
  return Vec3{static_cast<double>(sx / n), static_cast<double>(sy / n), static_cast<double>(sz / n)};
}

Vec3 normalize(const Vec3& p, const Dims& dims) {
  Vec3 out;
  for (int a = 0; a < 3; ++a) out[a] = dims[a] > 1 ? p[a] / static_cast<double>(dims[a] - 1) : 0.5;
  return out;
}

Vec3 denormalize(const Vec3& p, const Dims& dims) {
  Vec3 out;
  for (int a = 0; a < 3; ++a) out[a] = dims[a] > 1 ? p[a] * static_cast<double>(dims[a] - 1) : 0.0;
  return out;
}

}  // namespace aforge
