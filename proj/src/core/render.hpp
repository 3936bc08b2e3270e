#pragma once

#include "placement.hpp"
#include "rng.hpp"
#include "volume.hpp"

namespace aforge {

struct RenderParams {
  int shell_thickness = 1;
  float intensity_lo = 0.3f;
  float intensity_hi = 1.0f;
  float background = 0.0f;
  double noise_sigma = 0.02;
  bool per_instance_intensity = true;

  void validate() const;
};

// Filled labels composited in compositing_order(): smaller organs end on top.
LabelGrid render_labels(const SceneState& scene);

// Contour-shell image: each placement contributes only its outer
// `shell_thickness` layers, drawn in the same order as the labels, followed
// by additive Gaussian noise and a clamp to [0,1].
IntensityGrid render_image(const SceneState& scene, const RenderParams& params, Rng& rng);

}  // namespace aforge
