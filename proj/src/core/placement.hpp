#pragma once

// Structure-aware sequential placement: candidate poses around a sampled
// anchor are scored by anchor distance, overlap with what is already placed
// and relation-graph rewards, and the best one is committed to the scene.

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anchors.hpp"
#include "relation_graph.hpp"
#include "rng.hpp"
#include "shape_bank.hpp"
#include "volume.hpp"

namespace aforge {

// An augmented shape with the per-voxel data scoring needs precomputed.
// `mask` carries a one-voxel margin, so a voxel's 6-neighbourhood inside the
// mask frame is complete.
struct PreparedShape {
  BinaryMask mask;
  std::vector<Index3> voxels;          // set voxels, scan order
  std::vector<std::uint8_t> boundary;  // per entry of `voxels`
  BBox3 tight;
  long long sum[3] = {0, 0, 0};  // integer coordinate sums of `voxels`

  explicit PreparedShape(BinaryMask m);
  std::size_t size() const { return voxels.size(); }
};

struct Candidate {
  Index3 offset;  // translation of the shape frame into the scene frame
  Vec3 centroid;  // normalized scene coordinates of the unclipped mask

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

// Normalized centroid of `shape` translated by `offset`.
Vec3 candidate_centroid(const PreparedShape& shape, Index3 offset, const Dims& scene);

struct RejectReason {
  Label other = 0;
  double iou = 0.0;
  double tau_hard = 0.0;

  friend bool operator==(const RejectReason&, const RejectReason&) = default;
};

struct ScoreBreakdown {
  double s_spatial = 0.0;
  double s_phys = 0.0;
  double s_topo = 0.0;
  std::optional<RejectReason> reject;

  bool rejected() const { return reject.has_value(); }
  // Empty when rejected.
  std::optional<double> total() const {
    if (reject) return std::nullopt;
    return s_spatial + s_phys + s_topo;
  }

  friend bool operator==(const ScoreBreakdown&, const ScoreBreakdown&) = default;
};

struct Placement {
  Label class_id = 0;
  int instance = 0;
  BinaryMask mask;
  Index3 offset;
  Vec3 centroid;
  Vec3 anchor;
  ScoreBreakdown score;
  int candidate_index = 0;
  int attempts = 1;
  std::size_t voxels = 0;  // set voxels that fall inside the scene

  friend bool operator==(const Placement&, const Placement&) = default;
};

struct SkipRecord {
  Label class_id = 0;
  int instance = 0;
  int attempts = 0;
  std::string reason;

  friend bool operator==(const SkipRecord&, const SkipRecord&) = default;
};

// Y^(k) per class and their union Y, plus the ordered placement log.
class SceneState {
 public:
  SceneState() = default;
  SceneState(Dims dims, int class_count);

  const Dims& dims() const { return dims_; }
  int class_count() const { return class_count_; }

  bool has_class(Label k) const { return k >= 1 && k <= class_count_ && !occupancy_[k - 1].empty(); }
  std::span<const std::uint8_t> occupancy(Label k) const { return occupancy_[k - 1]; }
  std::size_t class_voxels(Label k) const { return class_voxels_[k - 1]; }
  std::span<const std::uint8_t> union_occupancy() const { return union_; }
  std::size_t union_voxels() const { return union_voxels_; }

  // Marks the placement's voxels in Y^(class) and Y and appends it to the log.
  // Fills in `voxels`.
  void commit(Placement p);
  void record_skip(SkipRecord s) { skips_.push_back(std::move(s)); }

  const std::vector<Placement>& placements() const { return placements_; }
  const std::vector<SkipRecord>& skips() const { return skips_; }

  friend bool operator==(const SceneState&, const SceneState&) = default;

 private:
  Dims dims_;
  int class_count_ = 0;
  std::vector<std::vector<std::uint8_t>> occupancy_;  // allocated on first use
  std::vector<std::size_t> class_voxels_;
  std::vector<std::uint8_t> union_;
  std::size_t union_voxels_ = 0;
  std::vector<Placement> placements_;
  std::vector<SkipRecord> skips_;
};

inline constexpr int kCandidateRetries = 10;

// N candidate translations putting the shape centroid at anchor + delta,
// delta ~ N(0, sigma^2 I) in normalized units. A draw that leaves no voxel in
// the scene is redrawn up to kCandidateRetries times, then clamped so the
// shape lies inside. Throws kPlacement if the shape exceeds the scene.
std::vector<Candidate> generate_candidates(const PreparedShape& shape, const Vec3& anchor, const Dims& scene, int n,
                                           double sigma, Rng& rng);

ScoreBreakdown score_candidate(const PreparedShape& shape, Label class_id, const Candidate& c, const Vec3& anchor,
                               const SceneState& scene, const RelationGraph& graph);

// Highest total among non-rejected entries, lowest index on ties.
std::optional<std::size_t> select_best(std::span<const ScoreBreakdown> scored);

struct SynthesisConfig {
  Dims dims{128, 128, 128};
  int n_candidates = 40;
  double perturb_sigma = 0.12;
  int retries = 5;  // fresh anchors after the first attempt before skipping
  AugmentParams augment;
  std::map<Label, int> instances;  // classes absent here get one instance
  std::uint64_t seed = 0;
  std::optional<RelationWeights> weights;
  std::optional<double> tau_in;
  std::optional<double> nu_contact;
  std::optional<double> tau_hard;

  void validate() const;
  int instances_of(Label class_id) const;
};

// Graph with the config's weight and threshold overrides applied.
RelationGraph effective_graph(const RelationGraph& graph, const SynthesisConfig& config);

// Classes by descending mean bank-entry volume, ties by ascending id.
std::vector<Label> placement_order(const ShapeBank& bank);

// `graph` is used as given; pass effective_graph() to honour overrides.
SceneState synthesize_scene(const ShapeBank& bank, const AnchorModel& anchors, const RelationGraph& graph,
                            const SynthesisConfig& config, Rng& rng);

// Placement indices by descending in-scene voxel count, ties in placement
// order. Later entries are drawn on top.
std::vector<std::size_t> compositing_order(const SceneState& scene);

// The placement's mask clipped to the scene, in a local frame whose origin
// lies at `*origin` in scene coordinates.
BinaryMask clipped_mask(const Placement& p, const Dims& scene, Index3* origin);

struct Violation {
  std::size_t placement = 0;
  Label class_id = 0;
  Label other = 0;
  double iou = 0.0;
  double tau_hard = 0.0;
};

struct EdgeCheck {
  std::size_t placement = 0;
  RelationEdge edge;
  double value = 0.0;  // containment ratio or contact voxel count
  bool satisfied = false;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<EdgeCheck> containment;
  std::vector<EdgeCheck> adjacency;
  std::size_t edges_unreferenced = 0;  // reference class not placed earlier
  std::vector<double> anchor_residuals;  // |centroid - anchor| per placement

  std::size_t containment_satisfied() const;
  std::size_t adjacency_satisfied() const;
};

// Replays the placement log against dense per-class masks and recomputes
// every exclusion IoU, containment ratio and contact count relative to the
// organs placed before each step.
ValidationReport validate_scene(const SceneState& scene, const RelationGraph& graph);

}  // namespace aforge
