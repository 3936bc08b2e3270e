#include "manifest.hpp"

#include <cstdio>

namespace aforge {

using nlohmann::json;

std::vector<std::uint32_t> run_length_encode(const BinaryMask& m) {
  std::vector<std::uint32_t> runs;
  std::uint8_t current = 0;
  std::uint32_t length = 0;
  for (const std::uint8_t b : m.bits()) {
    if (b == current) {
      ++length;
      continue;
    }
    runs.push_back(length);
    current = b;
    length = 1;
  }
  runs.push_back(length);
  return runs;
}

BinaryMask run_length_decode(const Dims& dims, const std::vector<std::uint32_t>& runs) {
  std::vector<std::uint8_t> bits;
  bits.reserve(dims.count());
  std::uint8_t value = 0;
  for (const std::uint32_t r : runs) {
    if (r > dims.count() - bits.size()) throw Error(ErrorCode::kFormat, "mask runs exceed mask size");
    bits.insert(bits.end(), r, value);
    value ^= 1;
  }
  if (bits.size() != dims.count()) throw Error(ErrorCode::kFormat, "mask runs do not cover the mask");
  return BinaryMask(dims, std::move(bits));
}

namespace {

json vec(const Vec3& v) { return json::array({v.x, v.y, v.z}); }
json vec(const Index3& v) { return json::array({v.x, v.y, v.z}); }
json vec(const Dims& v) { return json::array({v.x, v.y, v.z}); }

Vec3 to_vec3(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }
Index3 to_index3(const json& j) { return {j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>()}; }
Dims to_dims(const json& j) { return {j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>()}; }

json name_or_null(const RelationGraph& graph, Label id) {
  const std::string& n = graph.name_of(id);
  return n.empty() ? json(nullptr) : json(n);
}

}  // namespace

json config_snapshot(const SynthesisConfig& config, const RenderParams& render, const RelationGraph& graph) {
  json instances = json::object();
  for (const auto& [cls, n] : config.instances) instances[std::to_string(cls)] = n;
  const RelationWeights& w = graph.weights();
  json j = {
      {"dims", vec(config.dims)},
      {"n_candidates", config.n_candidates},
      {"perturb_sigma", config.perturb_sigma},
      {"retries", config.retries},
      {"augment",
       {{"flip_prob", config.augment.flip_prob},
        {"rotation", config.augment.rotation_enabled},
        {"scale", json::array({config.augment.scale_lo, config.augment.scale_hi})}}},
      {"weights", {{"anchor", w.anchor}, {"overlap", w.overlap}, {"contain", w.contain}, {"adjacency", w.adjacency}}},
      {"instances", instances},
      {"render",
       {{"shell_thickness", render.shell_thickness},
        {"intensity", json::array({render.intensity_lo, render.intensity_hi})},
        {"background", render.background},
        {"noise_sigma", render.noise_sigma},
        {"per_instance_intensity", render.per_instance_intensity}}},
  };
  json overrides = json::object();
  if (config.tau_in) overrides["tau_in"] = *config.tau_in;
  if (config.nu_contact) overrides["nu_contact"] = *config.nu_contact;
  if (config.tau_hard) overrides["tau_hard"] = *config.tau_hard;
  j["threshold_overrides"] = overrides;
  return j;
}

json scene_manifest(const SceneState& scene, const RelationGraph& graph, const SynthesisConfig& config,
                    const RenderParams& render, std::uint64_t index) {
  json placements = json::array();
  std::size_t step = 0;
  for (const auto& p : scene.placements()) {
    json score = {{"s_spatial", p.score.s_spatial}, {"s_phys", p.score.s_phys}, {"s_topo", p.score.s_topo}};
    score["total"] = p.score.total() ? json(*p.score.total()) : json("REJECTED");
    placements.push_back({
        {"step", step++},
        {"class_id", p.class_id},
        {"class_name", name_or_null(graph, p.class_id)},
        {"instance", p.instance},
        {"offset", vec(p.offset)},
        {"centroid", vec(p.centroid)},
        {"anchor", vec(p.anchor)},
        {"candidate_index", p.candidate_index},
        {"attempts", p.attempts},
        {"voxels", p.voxels},
        {"score", score},
        {"mask", {{"dims", vec(p.mask.dims())}, {"runs", run_length_encode(p.mask)}}},
    });
  }
  json skips = json::array();
  for (const auto& s : scene.skips())
    skips.push_back({{"class_id", s.class_id},
                     {"class_name", name_or_null(graph, s.class_id)},
                     {"instance", s.instance},
                     {"attempts", s.attempts},
                     {"reason", s.reason}});
  return {
      {"format", "anatomy-forge-scene"},
      {"version", 1},
      {"index", index},
      {"seed", config.seed},
      {"dims", vec(scene.dims())},
      {"class_count", scene.class_count()},
      {"config", config_snapshot(config, render, graph)},
      {"placements", placements},
      {"skips", skips},
      {"files",
       {{"image", scene_file_name("img", index, ".nii")},
        {"label", scene_file_name("lab", index, ".nii")},
        {"manifest", scene_file_name("scene", index, ".json")}}},
  };
}

SceneState scene_from_manifest(const json& manifest) {
  try {
    if (manifest.at("format") != "anatomy-forge-scene") throw Error(ErrorCode::kFormat, "not a scene manifest");
    SceneState scene(to_dims(manifest.at("dims")), manifest.at("class_count").get<int>());
    for (const auto& jp : manifest.at("placements")) {
      Placement p;
      p.class_id = jp.at("class_id").get<Label>();
      p.instance = jp.at("instance").get<int>();
      p.offset = to_index3(jp.at("offset"));
      p.centroid = to_vec3(jp.at("centroid"));
      p.anchor = to_vec3(jp.at("anchor"));
      p.candidate_index = jp.at("candidate_index").get<int>();
      p.attempts = jp.at("attempts").get<int>();
      const auto& js = jp.at("score");
      p.score.s_spatial = js.at("s_spatial").get<double>();
      p.score.s_phys = js.at("s_phys").get<double>();
      p.score.s_topo = js.at("s_topo").get<double>();
      const auto& jm = jp.at("mask");
      p.mask = run_length_decode(to_dims(jm.at("dims")), jm.at("runs").get<std::vector<std::uint32_t>>());
      scene.commit(std::move(p));
    }
    for (const auto& js : manifest.at("skips"))
      scene.record_skip({js.at("class_id").get<Label>(), js.at("instance").get<int>(), js.at("attempts").get<int>(),
                         js.at("reason").get<std::string>()});
    return scene;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("malformed scene manifest: ") + e.what());
  }
}

std::string scene_file_name(const char* prefix, std::uint64_t index, const char* extension) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%06llu%s", prefix, static_cast<unsigned long long>(index), extension);
  return buf;
}

}  // namespace aforge
