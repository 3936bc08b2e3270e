#include "dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <regex>

#include "byteio.hpp"
#include "manifest.hpp"
#include "nifti.hpp"
#include "render.hpp"

namespace aforge {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<SceneFiles> list_scenes(const std::string& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kIo, "not a directory: '" + dir + "'");
  static const std::regex pattern(R"(scene_(\d+)\.json)");
  std::vector<SceneFiles> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    std::smatch m;
    if (!entry.is_regular_file() || !std::regex_match(name, m, pattern)) continue;
    SceneFiles f;
    f.index = std::stoull(m[1].str());
    f.manifest = entry.path().string();
    const fs::path label = entry.path().parent_path() / scene_file_name("lab", f.index, ".nii");
    const fs::path label_gz = entry.path().parent_path() / scene_file_name("lab", f.index, ".nii.gz");
    if (fs::exists(label)) f.label = label.string();
    else if (fs::exists(label_gz)) f.label = label_gz.string();
    out.push_back(std::move(f));
  }
  if (out.empty()) throw Error(ErrorCode::kData, "no scene manifests (scene_*.json) in '" + dir + "'");
  std::sort(out.begin(), out.end(), [](const SceneFiles& a, const SceneFiles& b) { return a.index < b.index; });
  return out;
}

void CentroidStats::add_scene(const LabelGrid& labels) {
  const auto centroids = class_centroids(labels);
  for (int v = 1; v < 256; ++v) {
    if (!centroids[v]) continue;
    if (v < static_cast<int>(samples_.size())) {
      samples_[v].push_back(*centroids[v]);
    } else if (std::find(unknown_.begin(), unknown_.end(), v) == unknown_.end()) {
      unknown_.push_back(static_cast<Label>(v));
    }
  }
}

Vec3 CentroidStats::mean(Label id) const {
  Vec3 m;
  const auto& s = samples_[id];
  for (const Vec3& p : s)
    for (int a = 0; a < 3; ++a) m[a] += p[a];
  if (!s.empty())
    for (int a = 0; a < 3; ++a) m[a] /= static_cast<double>(s.size());
  return m;
}

std::array<double, 9> CentroidStats::covariance(Label id) const {
  std::array<double, 9> cov{};
  const auto& s = samples_[id];
  if (s.size() < 2) return cov;
  const Vec3 m = mean(id);
  for (const Vec3& p : s)
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) cov[3 * r + c] += (p[r] - m[r]) * (p[c] - m[c]);
  for (auto& v : cov) v /= static_cast<double>(s.size() - 1);
  return cov;
}

namespace {

json load_manifest(const std::string& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, path + ": " + e.what());
  }
}

// The graph the scene was generated under: thresholds overridden at
// synthesis time are recorded in the manifest.
RelationGraph graph_for(const RelationGraph& graph, const json& manifest) {
  SynthesisConfig overrides;
  const json& o = manifest.at("config").value("threshold_overrides", json::object());
  if (o.contains("tau_in")) overrides.tau_in = o.at("tau_in").get<double>();
  if (o.contains("nu_contact")) overrides.nu_contact = o.at("nu_contact").get<double>();
  if (o.contains("tau_hard")) overrides.tau_hard = o.at("tau_hard").get<double>();
  return effective_graph(graph, overrides);
}

json rate(std::size_t satisfied, std::size_t checked) {
  return {{"checked", checked},
          {"satisfied", satisfied},
          {"rate", checked ? json(static_cast<double>(satisfied) / static_cast<double>(checked)) : json(nullptr)}};
}

}  // namespace

json validate_directory(const std::string& dir, const RelationGraph& graph) {
  const auto scenes = list_scenes(dir);
  std::size_t placements = 0, skips = 0, unreferenced = 0;
  std::size_t contain_checked = 0, contain_ok = 0, adj_checked = 0, adj_ok = 0;
  double residual_sum = 0.0, residual_max = 0.0;
  std::size_t residual_n = 0;
  std::size_t exclusion_count = 0;
  json violations = json::array();
  json mismatches = json::array();

  for (const auto& files : scenes) {
    const json manifest = load_manifest(files.manifest);
    const SceneState scene = scene_from_manifest(manifest);
    if (scene.class_count() != graph.class_count())
      throw Error(ErrorCode::kData, files.manifest + ": scene has " + std::to_string(scene.class_count()) +
                                        " classes, graph has " + std::to_string(graph.class_count()));
    const ValidationReport report = validate_scene(scene, graph_for(graph, manifest));
    placements += scene.placements().size();
    skips += scene.skips().size();
    unreferenced += report.edges_unreferenced;
    contain_checked += report.containment.size();
    contain_ok += report.containment_satisfied();
    adj_checked += report.adjacency.size();
    adj_ok += report.adjacency_satisfied();
    for (const double r : report.anchor_residuals) {
      residual_sum += r;
      residual_max = std::max(residual_max, r);
      ++residual_n;
    }
    for (const auto& v : report.violations) {
      ++exclusion_count;
      violations.push_back({{"scene", files.index},
                            {"step", v.placement},
                            {"class_id", v.class_id},
                            {"other", v.other},
                            {"iou", v.iou},
                            {"tau_hard", v.tau_hard}});
    }
    if (files.label.empty()) {
      mismatches.push_back({{"scene", files.index}, {"reason", "label volume missing"}});
      continue;
    }
    const LabelGrid stored = to_label_grid(read_nifti(files.label));
    const LabelGrid expected = render_labels(scene);
    if (!(stored.dims() == expected.dims())) {
      mismatches.push_back({{"scene", files.index}, {"reason", "label volume dimensions differ from manifest"}});
      continue;
    }
    std::size_t differing = 0;
    for (std::size_t i = 0; i < stored.size(); ++i) differing += stored[i] != expected[i];
    if (differing)
      mismatches.push_back({{"scene", files.index}, {"reason", "label voxels differ from manifest masks"}, {"voxels", differing}});
  }

  return {{"scenes", scenes.size()},
          {"placements", placements},
          {"skips", skips},
          {"hard_violations", exclusion_count + mismatches.size()},
          {"exclusion_violations", violations},
          {"label_mismatches", mismatches},
          {"containment", rate(contain_ok, contain_checked)},
          {"adjacency", rate(adj_ok, adj_checked)},
          {"unreferenced_edges", unreferenced},
          {"anchor_residual",
           {{"mean", residual_n ? json(residual_sum / static_cast<double>(residual_n)) : json(nullptr)},
            {"max", residual_max}}}};
}

json centroid_report(const std::string& dir, const AnchorModel& anchors) {
  const auto scenes = list_scenes(dir);
  CentroidStats stats(anchors.class_count());
  json warnings = json::array();
  std::size_t used = 0;
  for (const auto& files : scenes) {
    if (files.label.empty()) {
      warnings.push_back("scene " + std::to_string(files.index) + ": label volume missing, skipped");
      continue;
    }
    const json manifest = load_manifest(files.manifest);
    if (manifest.at("class_count").get<int>() != anchors.class_count())
      warnings.push_back("scene " + std::to_string(files.index) + " has " +
                         std::to_string(manifest.at("class_count").get<int>()) + " classes, anchor table has " +
                         std::to_string(anchors.class_count()));
    stats.add_scene(to_label_grid(read_nifti(files.label)));
    ++used;
  }
  for (const Label v : stats.unknown_labels())
    warnings.push_back("label " + std::to_string(v) + " appears in scenes but not in the anchor table");

  json classes = json::array();
  for (Label id = 1; id <= anchors.class_count(); ++id) {
    const AnchorDistribution& a = anchors.at(id);
    const std::size_t n = stats.count(id);
    json row = {{"class_id", id}, {"n", n}, {"low_n", n < 2}, {"mu", {a.mu.x, a.mu.y, a.mu.z}}};
    if (n == 0) {
      warnings.push_back("class " + std::to_string(id) + " never appears in the scenes");
      row["mean"] = nullptr;
      classes.push_back(row);
      continue;
    }
    const Vec3 m = stats.mean(id);
    const Vec3 diff{std::abs(m.x - a.mu.x), std::abs(m.y - a.mu.y), std::abs(m.z - a.mu.z)};
    row["mean"] = {m.x, m.y, m.z};
    row["cov"] = stats.covariance(id);
    row["sigma"] = a.sigma;
    row["abs_diff"] = {diff.x, diff.y, diff.z};
    row["max_abs_diff"] = std::max({diff.x, diff.y, diff.z});
    classes.push_back(row);
  }
  return {{"scenes", used}, {"low_n", used < 2}, {"classes", classes}, {"warnings", warnings}};
}

}  // namespace aforge
