#include "placement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace aforge {

PreparedShape::PreparedShape(BinaryMask m) : mask(std::move(m)) {
  const Dims d = mask.dims();
  bool any = false;
  tight = {{d.x, d.y, d.z}, {-1, -1, -1}};
  for (int k = 0; k < d.z; ++k)
    for (int j = 0; j < d.y; ++j)
      for (int i = 0; i < d.x; ++i) {
        if (!mask.get(i, j, k)) continue;
        any = true;
        voxels.push_back({i, j, k});
        const bool edge = i == 0 || j == 0 || k == 0 || i == d.x - 1 || j == d.y - 1 || k == d.z - 1 ||
                          !mask.get(i + 1, j, k) || !mask.get(i - 1, j, k) || !mask.get(i, j + 1, k) ||
                          !mask.get(i, j - 1, k) || !mask.get(i, j, k + 1) || !mask.get(i, j, k - 1);
        boundary.push_back(edge ? 1 : 0);
        sum[0] += i;
        sum[1] += j;
        sum[2] += k;
        tight.min = {std::min(tight.min.x, i), std::min(tight.min.y, j), std::min(tight.min.z, k)};
        tight.max = {std::max(tight.max.x, i), std::max(tight.max.y, j), std::max(tight.max.z, k)};
      }
  if (!any) throw Error(ErrorCode::kInvalidArgument, "cannot place an empty shape");
}

Vec3 candidate_centroid(const PreparedShape& shape, Index3 offset, const Dims& scene) {
  const long long n = static_cast<long long>(shape.size());
  const int off[3] = {offset.x, offset.y, offset.z};
  Vec3 c;
  for (int a = 0; a < 3; ++a) {
    const double voxel = static_cast<double>(shape.sum[a] + n * off[a]) / static_cast<double>(n);
    c[a] = scene[a] > 1 ? voxel / static_cast<double>(scene[a] - 1) : 0.5;
  }
  return c;
}

SceneState::SceneState(Dims dims, int class_count)
    : dims_(dims),
      class_count_(class_count),
      occupancy_(static_cast<std::size_t>(class_count)),
      class_voxels_(static_cast<std::size_t>(class_count), 0),
      union_(dims.count(), 0) {
  if (!dims.valid()) throw Error(ErrorCode::kInvalidArgument, "scene dimensions must be positive");
}

void SceneState::commit(Placement p) {
  if (p.class_id < 1 || p.class_id > class_count_)
    throw Error(ErrorCode::kInvalidArgument, "placement class outside 1..C");
  auto& occ = occupancy_[p.class_id - 1];
  if (occ.empty()) occ.assign(dims_.count(), 0);
  const Dims md = p.mask.dims();
  std::size_t inside = 0;
  for (int k = 0; k < md.z; ++k)
    for (int j = 0; j < md.y; ++j)
      for (int i = 0; i < md.x; ++i) {
        if (!p.mask.get(i, j, k)) continue;
        const Index3 s = p.offset + Index3{i, j, k};
        if (!dims_.contains(s)) continue;
        ++inside;
        const std::size_t flat = dims_.index(s);
        if (!occ[flat]) {
          occ[flat] = 1;
          ++class_voxels_[p.class_id - 1];
        }
        if (!union_[flat]) {
          union_[flat] = 1;
          ++union_voxels_;
        }
      }
  p.voxels = inside;
  placements_.push_back(std::move(p));
}

namespace {

bool touches_scene(const PreparedShape& shape, Index3 off, const Dims& scene) {
  const Index3 lo = shape.tight.min + off;
  const Index3 hi = shape.tight.max + off;
  if (hi.x < 0 || hi.y < 0 || hi.z < 0 || lo.x >= scene.x || lo.y >= scene.y || lo.z >= scene.z) return false;
  for (const Index3& v : shape.voxels)
    if (scene.contains(v + off)) return true;
  return false;
}

}  // namespace

std::vector<Candidate> generate_candidates(const PreparedShape& shape, const Vec3& anchor, const Dims& scene, int n,
                                           double sigma, Rng& rng) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one candidate");
  if (!(sigma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "perturbation sigma must be positive");
  const Dims ext = shape.tight.extent();
  if (ext.x > scene.x || ext.y > scene.y || ext.z > scene.z) {
    std::ostringstream msg;
    msg << "shape extent " << ext.x << 'x' << ext.y << 'x' << ext.z << " exceeds scene " << scene.x << 'x' << scene.y
        << 'x' << scene.z;
    throw Error(ErrorCode::kPlacement, msg.str());
  }
  const double count = static_cast<double>(shape.size());
  const Vec3 local{shape.sum[0] / count, shape.sum[1] / count, shape.sum[2] / count};

  std::vector<Candidate> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    Index3 off;
    bool ok = false;
    for (int attempt = 0; attempt <= kCandidateRetries && !ok; ++attempt) {
      Vec3 target;
      for (int a = 0; a < 3; ++a) target[a] = anchor[a] + sigma * standard_normal(rng);
      const Vec3 voxel = denormalize(target, scene);
      off = {static_cast<int>(std::lround(voxel.x - local.x)), static_cast<int>(std::lround(voxel.y - local.y)),
             static_cast<int>(std::lround(voxel.z - local.z))};
      ok = touches_scene(shape, off, scene);
    }
    if (!ok) {
      off.x = std::clamp(off.x, -shape.tight.min.x, scene.x - 1 - shape.tight.max.x);
      off.y = std::clamp(off.y, -shape.tight.min.y, scene.y - 1 - shape.tight.max.y);
      off.z = std::clamp(off.z, -shape.tight.min.z, scene.z - 1 - shape.tight.max.z);
    }
    out.push_back({off, candidate_centroid(shape, off, scene)});
  }
  return out;
}

ScoreBreakdown score_candidate(const PreparedShape& shape, Label class_id, const Candidate& c, const Vec3& anchor,
                               const SceneState& scene, const RelationGraph& graph) {
  const RelationWeights& w = graph.weights();

  // Every reference class whose occupancy the voxel walk has to sample.
  struct Ref {
    Label k;
    const std::uint8_t* occ;
    std::size_t inter = 0;
    std::size_t contact = 0;
  };
  std::vector<Ref> refs;
  auto ref_index = [&](Label k) -> std::size_t {
    for (std::size_t i = 0; i < refs.size(); ++i)
      if (refs[i].k == k) return i;
    refs.push_back({k, scene.occupancy(k).data()});
    return refs.size() - 1;
  };
  const auto exclusions = exclusion_partners(graph, class_id);
  const auto containments = edges_for(graph, class_id, RelationKind::kContainment);
  const auto adjacencies = edges_for(graph, class_id, RelationKind::kAdjacency);
  for (const auto& [k, tau] : exclusions)
    if (scene.has_class(k)) ref_index(k);
  for (const auto& e : containments)
    if (scene.has_class(e.b)) ref_index(e.b);
  for (const auto& e : adjacencies)
    if (scene.has_class(e.b)) ref_index(e.b);

  const Dims d = scene.dims();
  const auto uni = scene.union_occupancy();
  std::size_t inside = 0;
  std::size_t union_hits = 0;
  for (std::size_t v = 0; v < shape.voxels.size(); ++v) {
    const Index3 p = shape.voxels[v] + c.offset;
    if (!d.contains(p)) continue;
    ++inside;
    const std::size_t flat = d.index(p);
    union_hits += uni[flat];
    const bool edge = shape.boundary[v] || p.x == 0 || p.y == 0 || p.z == 0 || p.x == d.x - 1 || p.y == d.y - 1 ||
                      p.z == d.z - 1;
    for (auto& r : refs) {
      if (!r.occ[flat]) continue;
      ++r.inter;
      if (edge) ++r.contact;
    }
  }
  if (inside == 0) throw Error(ErrorCode::kInvalidArgument, "candidate lies entirely outside the scene");

  auto find = [&](Label k) -> const Ref& { return refs[ref_index(k)]; };
  auto ratio_iou = [&](std::size_t inter, std::size_t other) {
    return static_cast<double>(inter) / static_cast<double>(inside + other - inter);
  };

  ScoreBreakdown s;
  s.s_spatial = -w.anchor * distance(c.centroid, anchor);
  s.s_phys = -w.overlap * ratio_iou(union_hits, scene.union_voxels());
  for (const auto& [k, tau] : exclusions) {
    if (!scene.has_class(k)) continue;
    const double o = ratio_iou(find(k).inter, scene.class_voxels(k));
    if (o > tau) {
      s.reject = RejectReason{k, o, tau};
      break;
    }
  }
  double topo = 0.0;
  for (const auto& e : containments) {
    if (!scene.has_class(e.b)) continue;
    const double ratio = static_cast<double>(find(e.b).inter) / static_cast<double>(inside);
    if (ratio > e.threshold) topo += w.contain;
  }
  for (const auto& e : adjacencies) {
    if (!scene.has_class(e.b)) continue;
    if (static_cast<double>(find(e.b).contact) > e.threshold) topo += w.adjacency;
  }
  s.s_topo = topo;
  return s;
}

std::optional<std::size_t> select_best(std::span<const ScoreBreakdown> scored) {
  std::optional<std::size_t> best;
  double best_total = 0.0;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    const auto t = scored[i].total();
    if (!t) continue;
    if (!best || *t > best_total) {
      best = i;
      best_total = *t;
    }
  }
  return best;
}

void SynthesisConfig::validate() const {
  if (dims.x < 32 || dims.y < 32 || dims.z < 32) throw Error(ErrorCode::kConfig, "scene dims must be >= 32 per axis");
  if (n_candidates < 1) throw Error(ErrorCode::kConfig, "n_candidates must be >= 1");
  if (!(perturb_sigma > 0.0)) throw Error(ErrorCode::kConfig, "perturb_sigma must be > 0");
  if (retries < 0) throw Error(ErrorCode::kConfig, "retries must be >= 0");
  augment.validate();
  for (const auto& [cls, n] : instances)
    if (n < 0) throw Error(ErrorCode::kConfig, "instance count must be >= 0");
  if (tau_in && !(*tau_in > 0.0 && *tau_in <= 1.0)) throw Error(ErrorCode::kConfig, "tau_in must lie in (0,1]");
  if (tau_hard && !(*tau_hard > 0.0 && *tau_hard <= 1.0)) throw Error(ErrorCode::kConfig, "tau_hard must lie in (0,1]");
  if (nu_contact && (!(*nu_contact >= 1.0) || *nu_contact != std::floor(*nu_contact)))
    throw Error(ErrorCode::kConfig, "nu_contact must be an integer >= 1");
}

int SynthesisConfig::instances_of(Label class_id) const {
  const auto it = instances.find(class_id);
  return it == instances.end() ? 1 : it->second;
}

RelationGraph effective_graph(const RelationGraph& graph, const SynthesisConfig& config) {
  std::vector<RelationEdge> edges = graph.edges();
  for (auto& e : edges) {
    if (e.kind == RelationKind::kContainment && config.tau_in) e.threshold = *config.tau_in;
    if (e.kind == RelationKind::kAdjacency && config.nu_contact) e.threshold = *config.nu_contact;
    if (e.kind == RelationKind::kExclusion && config.tau_hard) e.threshold = *config.tau_hard;
  }
  return RelationGraph(graph.class_count(), graph.names(), std::move(edges), config.weights.value_or(graph.weights()));
}

std::vector<Label> placement_order(const ShapeBank& bank) {
  std::vector<Label> order;
  std::vector<double> volume(static_cast<std::size_t>(bank.class_count()) + 1, 0.0);
  for (Label id = 1; id <= bank.class_count(); ++id) {
    order.push_back(id);
    volume[id] = bank.mean_voxels(id);
  }
  std::stable_sort(order.begin(), order.end(), [&](Label a, Label b) { return volume[a] > volume[b]; });
  return order;
}

SceneState synthesize_scene(const ShapeBank& bank, const AnchorModel& anchors, const RelationGraph& graph,
                            const SynthesisConfig& config, Rng& rng) {
  config.validate();
  const int C = bank.class_count();
  if (anchors.class_count() != C || graph.class_count() != C)
    throw Error(ErrorCode::kConfig, "bank, anchors and graph disagree on the class count");

  SceneState scene(config.dims, C);
  for (const Label cls : placement_order(bank)) {
    for (int inst = 0; inst < config.instances_of(cls); ++inst) {
      std::optional<PreparedShape> shape;
      std::string reason;
      bool placed = false;
      int attempt = 0;
      for (; attempt <= config.retries && !placed; ++attempt) {
        if (!shape) shape.emplace(sample_shape(bank, cls, config.augment, rng));
        const Vec3 anchor = sample_anchor(anchors, cls, rng);
        std::vector<Candidate> cands;
        try {
          cands = generate_candidates(*shape, anchor, scene.dims(), config.n_candidates, config.perturb_sigma, rng);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kPlacement) throw;
          reason = e.what();
          shape.reset();
          continue;
        }
        std::vector<ScoreBreakdown> scores;
        scores.reserve(cands.size());
        for (const auto& c : cands) scores.push_back(score_candidate(*shape, cls, c, anchor, scene, graph));
        if (const auto best = select_best(scores)) {
          Placement p;
          p.class_id = cls;
          p.instance = inst;
          p.mask = shape->mask;
          p.offset = cands[*best].offset;
          p.centroid = cands[*best].centroid;
          p.anchor = anchor;
          p.score = scores[*best];
          p.candidate_index = static_cast<int>(*best);
          p.attempts = attempt + 1;
          scene.commit(std::move(p));
          placed = true;
        } else {
          const RejectReason& r = *scores.front().reject;
          std::ostringstream msg;
          msg << "all " << cands.size() << " candidates rejected (first: exclusion with class "
              << static_cast<int>(r.other) << ", IoU " << r.iou << " > " << r.tau_hard << ")";
          reason = msg.str();
        }
      }
      if (!placed) scene.record_skip({cls, inst, attempt, reason});
    }
  }
  if (scene.placements().empty()) throw Error(ErrorCode::kPlacement, "no instance could be placed in the scene");
  return scene;
}

std::vector<std::size_t> compositing_order(const SceneState& scene) {
  std::vector<std::size_t> order(scene.placements().size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& ps = scene.placements();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ps[a].voxels > ps[b].voxels; });
  return order;
}

BinaryMask clipped_mask(const Placement& p, const Dims& scene, Index3* origin) {
  const Dims md = p.mask.dims();
  const Index3 lo{std::max(0, -p.offset.x), std::max(0, -p.offset.y), std::max(0, -p.offset.z)};
  const Index3 hi{std::min(md.x, scene.x - p.offset.x) - 1, std::min(md.y, scene.y - p.offset.y) - 1,
                  std::min(md.z, scene.z - p.offset.z) - 1};
  if (hi.x < lo.x || hi.y < lo.y || hi.z < lo.z)
    throw Error(ErrorCode::kData, "placement lies entirely outside the scene");
  if (origin) *origin = p.offset + lo;
  return crop(p.mask, {lo, hi}, 0);
}

std::size_t ValidationReport::containment_satisfied() const {
  return static_cast<std::size_t>(
      std::count_if(containment.begin(), containment.end(), [](const EdgeCheck& c) { return c.satisfied; }));
}

std::size_t ValidationReport::adjacency_satisfied() const {
  return static_cast<std::size_t>(
      std::count_if(adjacency.begin(), adjacency.end(), [](const EdgeCheck& c) { return c.satisfied; }));
}

ValidationReport validate_scene(const SceneState& scene, const RelationGraph& graph) {
  const Dims d = scene.dims();
  const int C = scene.class_count();
  std::vector<std::vector<std::uint8_t>> occ(static_cast<std::size_t>(C) + 1);
  std::vector<std::size_t> counts(static_cast<std::size_t>(C) + 1, 0);
  ValidationReport report;

  const auto& ps = scene.placements();
  for (std::size_t t = 0; t < ps.size(); ++t) {
    const Placement& p = ps[t];
    Index3 origin;
    const BinaryMask local = clipped_mask(p, d, &origin);
    const BinaryMask edge = boundary_voxels(local);
    const std::size_t m = local.count();
    const Dims ld = local.dims();

    auto overlap = [&](Label k, const BinaryMask& with) {
      std::size_t n = 0;
      if (occ[k].empty()) return n;
      for (int z = 0; z < ld.z; ++z)
        for (int y = 0; y < ld.y; ++y)
          for (int x = 0; x < ld.x; ++x)
            if (with.get(x, y, z) && occ[k][d.index(origin + Index3{x, y, z})]) ++n;
      return n;
    };

    for (const auto& [k, tau] : exclusion_partners(graph, p.class_id)) {
      if (k > C || counts[k] == 0) continue;
      const std::size_t inter = overlap(k, local);
      const double v = static_cast<double>(inter) / static_cast<double>(m + counts[k] - inter);
      if (v > tau) report.violations.push_back({t, p.class_id, k, v, tau});
    }
    for (const auto& e : edges_for(graph, p.class_id, RelationKind::kContainment)) {
      if (e.b > C || counts[e.b] == 0) {
        ++report.edges_unreferenced;
        continue;
      }
      const double ratio = static_cast<double>(overlap(e.b, local)) / static_cast<double>(m);
      report.containment.push_back({t, e, ratio, ratio > e.threshold});
    }
    for (const auto& e : edges_for(graph, p.class_id, RelationKind::kAdjacency)) {
      if (e.b > C || counts[e.b] == 0) {
        ++report.edges_unreferenced;
        continue;
      }
      const double contact = static_cast<double>(overlap(e.b, edge));
      report.adjacency.push_back({t, e, contact, contact > e.threshold});
    }
    report.anchor_residuals.push_back(distance(p.centroid, p.anchor));

    auto& mine = occ[p.class_id];
    if (mine.empty()) mine.assign(d.count(), 0);
    for (int z = 0; z < ld.z; ++z)
      for (int y = 0; y < ld.y; ++y)
        for (int x = 0; x < ld.x; ++x) {
          if (!local.get(x, y, z)) continue;
          auto& cell = mine[d.index(origin + Index3{x, y, z})];
          if (!cell) {
            cell = 1;
            ++counts[p.class_id];
          }
        }
  }
  return report;
}

}  // namespace aforge
