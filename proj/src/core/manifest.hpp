#pragma once

// JSON scene manifests. A manifest records every placement (with its mask,
// run-length encoded), every skipped instance, the seed and a snapshot of the
// configuration, which is enough to rebuild the SceneState exactly.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "placement.hpp"
#include "render.hpp"

namespace aforge {

// Run lengths over the flat mask, alternating background/foreground and
// starting with a (possibly zero) background run.
std::vector<std::uint32_t> run_length_encode(const BinaryMask& m);
BinaryMask run_length_decode(const Dims& dims, const std::vector<std::uint32_t>& runs);

nlohmann::json config_snapshot(const SynthesisConfig& config, const RenderParams& render, const RelationGraph& graph);

nlohmann::json scene_manifest(const SceneState& scene, const RelationGraph& graph, const SynthesisConfig& config,
                              const RenderParams& render, std::uint64_t index);

SceneState scene_from_manifest(const nlohmann::json& manifest);

std::string scene_file_name(const char* prefix, std::uint64_t index, const char* extension);

}  // namespace aforge
