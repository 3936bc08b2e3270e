#pragma once

#include <optional>
#include <string>
#include <vector>

#include "volume.hpp"

namespace aforge {

enum class RelationKind { kContainment, kAdjacency, kExclusion };

const char* to_string(RelationKind kind);

// Directed edge: `a` is the organ being placed, `b` the reference organ.
// `threshold` means tau_in for containment, nu_contact (voxels) for adjacency
// and tau_hard for exclusion.
struct RelationEdge {
  RelationKind kind = RelationKind::kContainment;
  Label a = 0;
  Label b = 0;
  double threshold = 0.0;

  friend bool operator==(const RelationEdge&, const RelationEdge&) = default;
};

struct RelationWeights {
  double anchor = 1.0;     // lambda_anc
  double overlap = 1.0;    // lambda_ovl
  double contain = 1.0;    // lambda_in
  double adjacency = 0.8;  // lambda_adj

  friend bool operator==(const RelationWeights&, const RelationWeights&) = default;
};

inline constexpr double kDefaultTauIn = 0.30;
inline constexpr double kDefaultNuContact = 20.0;
inline constexpr double kDefaultTauHard = 0.35;

class RelationGraph {
 public:
  RelationGraph() = default;
  // Validates every invariant; throws kConfig on violation.
  RelationGraph(int class_count, std::vector<std::string> names, std::vector<RelationEdge> edges,
                RelationWeights weights = {});

  int class_count() const { return class_count_; }
  const std::vector<RelationEdge>& edges() const { return edges_; }
  const RelationWeights& weights() const { return weights_; }
  // Empty when the class was never named.
  const std::string& name_of(Label id) const;
  std::optional<Label> id_of(const std::string& name) const;
  const std::vector<std::string>& names() const { return names_; }

  friend bool operator==(const RelationGraph&, const RelationGraph&) = default;

 private:
  int class_count_ = 0;
  std::vector<std::string> names_;  // index id - 1
  std::vector<RelationEdge> edges_;
  RelationWeights weights_;
};

// Line-oriented config:
//   class <id> <name>
//   containment <child> <parent> [tau_in]
//   adjacency <a> <b> [nu_contact]
//   exclusion <a> <b> [tau_hard]
//   weights <anc> <ovl> <in> <adj>
// Classes may be referenced by id or by a previously declared name.
RelationGraph load_graph(const std::string& text, int class_count);
RelationGraph load_graph_file(const std::string& path, int class_count);
std::string serialize_graph(const RelationGraph& graph);

// Edges of `kind` whose placed organ is `class_id`, in declaration order.
std::vector<RelationEdge> edges_for(const RelationGraph& graph, Label class_id, RelationKind kind);

// Exclusion partners of `class_id` regardless of declared direction, as
// (other class, tau_hard) pairs in declaration order.
std::vector<std::pair<Label, double>> exclusion_partners(const RelationGraph& graph, Label class_id);

}  // namespace aforge
