#include "generator.hpp"

#include <filesystem>

#include "byteio.hpp"
#include "nifti.hpp"

namespace aforge {

namespace {

constexpr std::uint32_t kPlacementStream = 0;
constexpr std::uint32_t kRenderStream = 1;

}  // namespace

Generator::Generator(ShapeBank bank, AnchorModel anchors, const RelationGraph& graph, SynthesisConfig config,
                     RenderParams render)
    : bank_(std::move(bank)),
      anchors_(std::move(anchors)),
      graph_(effective_graph(graph, config)),
      config_(std::move(config)),
      render_(render) {
  config_.validate();
  render_.validate();
  const int C = bank_.class_count();
  if (anchors_.class_count() != C)
    throw Error(ErrorCode::kConfig, "anchor table has " + std::to_string(anchors_.class_count()) +
                                        " classes but the bank has " + std::to_string(C));
  if (graph_.class_count() != C)
    throw Error(ErrorCode::kConfig, "relation graph has " + std::to_string(graph_.class_count()) +
                                        " classes but the bank has " + std::to_string(C));
  for (const auto& [cls, n] : config_.instances)
    if (cls < 1 || cls > C) throw Error(ErrorCode::kConfig, "instance schedule names unknown class " + std::to_string(cls));
}

GeneratedScene Generator::generate(std::uint64_t index) const {
  GeneratedScene out;
  out.index = index;
  Rng placement_rng = make_stream(config_.seed, index, kPlacementStream);
  out.scene = synthesize_scene(bank_, anchors_, graph_, config_, placement_rng);
  out.labels = render_labels(out.scene);
  Rng render_rng = make_stream(config_.seed, index, kRenderStream);
  out.image = render_image(out.scene, render_, render_rng);
  out.manifest = scene_manifest(out.scene, graph_, config_, render_, index);
  return out;
}

nlohmann::json Generator::dataset_index(std::uint64_t count) const {
  nlohmann::json pairs = nlohmann::json::array();
  for (std::uint64_t i = 0; i < count; ++i)
    pairs.push_back({{"index", i},
                     {"image", scene_file_name("img", i, ".nii")},
                     {"label", scene_file_name("lab", i, ".nii")},
                     {"manifest", scene_file_name("scene", i, ".json")}});
  nlohmann::json classes = nlohmann::json::array();
  for (Label id = 1; id <= bank_.class_count(); ++id) {
    const std::string& name = graph_.name_of(id);
    classes.push_back({{"class_id", id},
                       {"raw_label", bank_.class_map().raw_of(id)},
                       {"name", name.empty() ? nlohmann::json(nullptr) : nlohmann::json(name)}});
  }
  return {{"format", "anatomy-forge-dataset"},
          {"version", 1},
          {"count", count},
          {"seed", config_.seed},
          {"axis_order", "x fastest, then y, then z"},
          {"classes", classes},
          {"config", config_snapshot(config_, render_, graph_)},
          {"pairs", pairs}};
}

void write_scene_files(const GeneratedScene& g, const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path base(dir);
  write_nifti(make_intensity_volume(g.image), (base / scene_file_name("img", g.index, ".nii")).string());
  write_nifti(make_label_volume(g.labels), (base / scene_file_name("lab", g.index, ".nii")).string());
  write_text_file((base / scene_file_name("scene", g.index, ".json")).string(), g.manifest.dump() + "\n");
}

}  // namespace aforge
