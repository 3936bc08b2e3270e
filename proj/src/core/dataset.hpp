#pragma once

// Whole-directory checks over generated scenes.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "anchors.hpp"
#include "placement.hpp"
#include "relation_graph.hpp"

namespace aforge {

struct SceneFiles {
  std::uint64_t index = 0;
  std::string manifest;
  std::string label;  // empty if the label volume is missing
};

// scene_*.json manifests in `dir`, sorted by index. Throws kData when none.
std::vector<SceneFiles> list_scenes(const std::string& dir);

// Accumulates per-class normalized centroid samples, one per scene.
class CentroidStats {
 public:
  explicit CentroidStats(int class_count) : samples_(static_cast<std::size_t>(class_count) + 1) {}

  void add_scene(const LabelGrid& labels);

  int class_count() const { return static_cast<int>(samples_.size()) - 1; }
  std::size_t count(Label id) const { return samples_[id].size(); }
  Vec3 mean(Label id) const;
  std::array<double, 9> covariance(Label id) const;  // unbiased; zero when n < 2
  // Labels seen in scenes that lie outside 1..C.
  const std::vector<Label>& unknown_labels() const { return unknown_; }

 private:
  std::vector<std::vector<Vec3>> samples_;
  std::vector<Label> unknown_;
};

// Runs validate_scene on every manifest and checks each label volume against
// the composite of its manifest masks. "hard_violations" counts exclusion
// violations plus label mismatches.
nlohmann::json validate_directory(const std::string& dir, const RelationGraph& graph);

// Per-class empirical centroid mean/covariance over the label volumes in
// `dir`, compared with the anchor table.
nlohmann::json centroid_report(const std::string& dir, const AnchorModel& anchors);

}  // namespace aforge
