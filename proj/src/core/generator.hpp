#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "anchors.hpp"
#include "manifest.hpp"
#include "placement.hpp"
#include "relation_graph.hpp"
#include "render.hpp"
#include "shape_bank.hpp"

namespace aforge {

struct GeneratedScene {
  std::uint64_t index = 0;
  SceneState scene;
  LabelGrid labels;
  IntensityGrid image;
  nlohmann::json manifest;
};

// Everything needed to produce scene `index` of a run. Immutable once built;
// generate() may be called concurrently.
class Generator {
 public:
  Generator(ShapeBank bank, AnchorModel anchors, const RelationGraph& graph, SynthesisConfig config,
            RenderParams render);

  // Scene `index` draws from stream (seed, index) for placement and a
  // separate stream for rendering noise.
  GeneratedScene generate(std::uint64_t index) const;

  const ShapeBank& bank() const { return bank_; }
  const RelationGraph& graph() const { return graph_; }
  const SynthesisConfig& config() const { return config_; }
  const RenderParams& render() const { return render_; }

  // dataset.json content for scenes 0..count-1.
  nlohmann::json dataset_index(std::uint64_t count) const;

 private:
  ShapeBank bank_;
  AnchorModel anchors_;
  RelationGraph graph_;  // overrides already applied
  SynthesisConfig config_;
  RenderParams render_;
};

// img_%06d.nii (float32), lab_%06d.nii (uint8) and scene_%06d.json.
void write_scene_files(const GeneratedScene& g, const std::string& dir);

}  // namespace aforge
