#include "render.hpp"

#include <algorithm>

namespace aforge {

void RenderParams::validate() const {
  if (shell_thickness < 1) throw Error(ErrorCode::kConfig, "shell thickness must be >= 1");
  if (!(intensity_lo > 0.0f && intensity_lo < intensity_hi && intensity_hi <= 1.0f))
    throw Error(ErrorCode::kConfig, "intensity range must satisfy 0 < lo < hi <= 1");
  if (!(background >= 0.0f && background <= 1.0f)) throw Error(ErrorCode::kConfig, "background must lie in [0,1]");
  if (!(noise_sigma >= 0.0)) throw Error(ErrorCode::kConfig, "noise sigma must be >= 0");
}

LabelGrid render_labels(const SceneState& scene) {
  LabelGrid out(scene.dims());
  for (const std::size_t i : compositing_order(scene)) {
    const Placement& p = scene.placements()[i];
    overlay(out, p.mask, p.offset, p.class_id);
  }
  return out;
}

IntensityGrid render_image(const SceneState& scene, const RenderParams& params, Rng& rng) {
  params.validate();
  const Dims d = scene.dims();
  IntensityGrid out(d, params.background);
  const float mid = 0.5f * (params.intensity_lo + params.intensity_hi);
  for (const std::size_t i : compositing_order(scene)) {
    const Placement& p = scene.placements()[i];
    float value = mid;
    if (params.per_instance_intensity)
      value = std::uniform_real_distribution<float>(params.intensity_lo, params.intensity_hi)(rng);
    Index3 origin;
    const BinaryMask local = clipped_mask(p, d, &origin);
    const BinaryMask rim = shell(local, params.shell_thickness);
    const Dims ld = rim.dims();
    for (int z = 0; z < ld.z; ++z)
      for (int y = 0; y < ld.y; ++y)
        for (int x = 0; x < ld.x; ++x)
          if (rim.get(x, y, z)) out[d.index(origin + Index3{x, y, z})] = value;
  }
  if (params.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, params.noise_sigma);
    for (auto& v : out.values()) v = static_cast<float>(std::clamp(static_cast<double>(v) + noise(rng), 0.0, 1.0));
  }
  return out;
}

}  // namespace aforge
