#include "phantom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace aforge {

namespace {

// clang-format off
constexpr PhantomOrgan kOrgans[] = {
    {1,  "spleen",                 PhantomShape::kEllipsoid, {0.75, 0.60, 0.55}, {0.07, 0.09, 0.10}},
    {2,  "kidney_right",           PhantomShape::kEllipsoid, {0.30, 0.70, 0.42}, {0.05, 0.06, 0.09}},
    {3,  "kidney_left",            PhantomShape::kEllipsoid, {0.70, 0.70, 0.44}, {0.05, 0.06, 0.09}},
    {4,  "gallbladder",            PhantomShape::kEllipsoid, {0.38, 0.40, 0.50}, {0.03, 0.03, 0.05}},
    {5,  "liver",                  PhantomShape::kEllipsoid, {0.30, 0.50, 0.56}, {0.17, 0.16, 0.13}},
    {6,  "stomach",                PhantomShape::kEllipsoid, {0.62, 0.40, 0.56}, {0.10, 0.08, 0.09}},
    {7,  "aorta",                  PhantomShape::kTube,      {0.50, 0.68, 0.50}, {0.025, 0.0, 0.30}},
    {8,  "inferior_vena_cava",     PhantomShape::kTube,      {0.43, 0.66, 0.47}, {0.025, 0.0, 0.27}},
    {9,  "portal_vein_and_splenic_vein", PhantomShape::kEllipsoid, {0.45, 0.55, 0.50}, {0.05, 0.02, 0.02}},
    {10, "pancreas",               PhantomShape::kEllipsoid, {0.56, 0.56, 0.46}, {0.10, 0.03, 0.03}},
    {11, "adrenal_gland_right",    PhantomShape::kEllipsoid, {0.33, 0.70, 0.54}, {0.02, 0.02, 0.03}},
    {12, "adrenal_gland_left",     PhantomShape::kEllipsoid, {0.66, 0.70, 0.55}, {0.02, 0.02, 0.03}},
    {13, "lung_upper_lobe_left",   PhantomShape::kEllipsoid, {0.70, 0.55, 0.86}, {0.12, 0.14, 0.08}},
    {14, "lung_lower_lobe_left",   PhantomShape::kEllipsoid, {0.70, 0.62, 0.72}, {0.12, 0.13, 0.07}},
    {15, "lung_upper_lobe_right",  PhantomShape::kEllipsoid, {0.30, 0.55, 0.87}, {0.12, 0.14, 0.07}},
    {16, "lung_middle_lobe_right", PhantomShape::kEllipsoid, {0.30, 0.42, 0.77}, {0.10, 0.08, 0.05}},
    {17, "lung_lower_lobe_right",  PhantomShape::kEllipsoid, {0.30, 0.62, 0.72}, {0.12, 0.13, 0.07}},
    {18, "vertebrae_L5",           PhantomShape::kBox,       {0.50, 0.82, 0.22}, {0.04, 0.04, 0.025}},
    {19, "vertebrae_L4",           PhantomShape::kBox,       {0.50, 0.82, 0.29}, {0.04, 0.04, 0.025}},
    {20, "vertebrae_L3",           PhantomShape::kBox,       {0.50, 0.82, 0.36}, {0.04, 0.04, 0.025}},
    {21, "vertebrae_L2",           PhantomShape::kBox,       {0.50, 0.82, 0.43}, {0.04, 0.04, 0.025}},
    {22, "vertebrae_L1",           PhantomShape::kBox,       {0.50, 0.82, 0.50}, {0.04, 0.04, 0.025}},
    {42, "esophagus",              PhantomShape::kTube,      {0.52, 0.64, 0.70}, {0.015, 0.0, 0.15}},
    {43, "trachea",                PhantomShape::kTube,      {0.50, 0.52, 0.88}, {0.02, 0.0, 0.08}},
    {44, "heart_myocardium",       PhantomShape::kShell,     {0.55, 0.42, 0.68}, {0.10, 0.09, 0.08}},
    {45, "heart_atrium_left",      PhantomShape::kEllipsoid, {0.58, 0.46, 0.72}, {0.035, 0.03, 0.03}},
    {46, "heart_ventricle_left",   PhantomShape::kEllipsoid, {0.60, 0.40, 0.65}, {0.035, 0.035, 0.035}},
    {47, "heart_atrium_right",     PhantomShape::kEllipsoid, {0.50, 0.46, 0.71}, {0.035, 0.03, 0.03}},
    {48, "heart_ventricle_right",  PhantomShape::kEllipsoid, {0.51, 0.38, 0.65}, {0.035, 0.035, 0.035}},
    {55, "small_bowel",            PhantomShape::kEllipsoid, {0.50, 0.40, 0.30}, {0.14, 0.09, 0.08}},
    {56, "duodenum",               PhantomShape::kEllipsoid, {0.46, 0.48, 0.42}, {0.06, 0.025, 0.025}},
    {57, "colon",                  PhantomShape::kRing,      {0.50, 0.45, 0.30}, {0.24, 0.17, 0.035}},
};
// clang-format on

double approximate_volume(const PhantomOrgan& o) {
  switch (o.shape) {
    case PhantomShape::kTube: return o.radii.x * o.radii.x * o.radii.z;
    case PhantomShape::kRing: return o.radii.x * o.radii.z * o.radii.z;
    default: return o.radii.x * o.radii.y * o.radii.z;
  }
}

bool inside(const PhantomOrgan& o, const Vec3& c, const Vec3& r, const Vec3& p) {
  const double dx = p.x - c.x, dy = p.y - c.y, dz = p.z - c.z;
  switch (o.shape) {
    case PhantomShape::kEllipsoid:
      return (dx * dx) / (r.x * r.x) + (dy * dy) / (r.y * r.y) + (dz * dz) / (r.z * r.z) <= 1.0;
    case PhantomShape::kShell: {
      const double e = (dx * dx) / (r.x * r.x) + (dy * dy) / (r.y * r.y) + (dz * dz) / (r.z * r.z);
      return e <= 1.0 && e >= 0.45;
    }
    case PhantomShape::kTube:
      return std::abs(dz) <= r.z && dx * dx + dy * dy <= r.x * r.x;
    case PhantomShape::kBox:
      return std::abs(dx) <= r.x && std::abs(dy) <= r.y && std::abs(dz) <= r.z;
    case PhantomShape::kRing: {
      // Elliptic ring in the xy plane with radii (r.x, r.y) and tube radius r.z.
      const double theta = std::atan2(dy / r.y, dx / r.x);
      const double qx = r.x * std::cos(theta), qy = r.y * std::sin(theta);
      const double ex = dx - qx, ey = dy - qy;
      return ex * ex + ey * ey + dz * dz <= r.z * r.z;
    }
  }
  return false;
}

}  // namespace

std::span<const PhantomOrgan> phantom_organs() { return kOrgans; }

LabelGrid make_phantom_subject(const Dims& dims, Rng& rng) {
  std::vector<const PhantomOrgan*> order;
  for (const auto& o : kOrgans) order.push_back(&o);
  std::stable_sort(order.begin(), order.end(), [](const PhantomOrgan* a, const PhantomOrgan* b) {
    return approximate_volume(*a) > approximate_volume(*b);
  });

  LabelGrid grid(dims);
  for (const PhantomOrgan* o : order) {
    Vec3 c = o->center;
    Vec3 r = o->radii;
    for (int a = 0; a < 3; ++a) c[a] += 0.015 * standard_normal(rng);
    const double s = 0.9 + 0.2 * uniform01(rng);
    for (int a = 0; a < 3; ++a) r[a] *= s;

    // Work in voxel units so anisotropic grids keep the intended shapes.
    const Vec3 cv = denormalize(c, dims);
    Vec3 rv;
    for (int a = 0; a < 3; ++a) rv[a] = std::max(1.0, r[a] * (dims[a] - 1));
    if (o->shape == PhantomShape::kTube) rv.y = rv.x;
    const double reach = std::max({rv.x, rv.y, rv.z}) + (o->shape == PhantomShape::kRing ? rv.z : 0.0) + 1.0;
    for (int k = std::max(0, static_cast<int>(cv.z - reach)); k <= std::min(dims.z - 1, static_cast<int>(cv.z + reach)); ++k)
      for (int j = std::max(0, static_cast<int>(cv.y - reach)); j <= std::min(dims.y - 1, static_cast<int>(cv.y + reach)); ++j)
        for (int i = std::max(0, static_cast<int>(cv.x - reach)); i <= std::min(dims.x - 1, static_cast<int>(cv.x + reach)); ++i)
          if (inside(*o, cv, rv, {static_cast<double>(i), static_cast<double>(j), static_cast<double>(k)}))
            grid.at(i, j, k) = o->raw;
  }
  return grid;
}

std::vector<LabeledSource> make_phantom_corpus(int subjects, std::uint64_t seed) {
  std::vector<LabeledSource> out;
  for (int s = 0; s < subjects; ++s) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(s), 7);
    const Dims dims{96 + 2 * (s % 3), 96 + 2 * ((s + 1) % 3), 100 + 2 * (s % 2)};
    char id[32];
    std::snprintf(id, sizeof(id), "phantom_%02d", s);
    out.push_back({id, make_phantom_subject(dims, rng)});
  }
  return out;
}

}  // namespace aforge
