#include "anatomy_forge/anatomy_forge.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "../core/anchors.hpp"
#include "../core/byteio.hpp"
#include "../core/dataset.hpp"
#include "../core/generator.hpp"
#include "../core/nifti.hpp"
#include "../core/phantom.hpp"
#include "../core/relation_graph.hpp"
#include "../core/shape_bank.hpp"

struct af_bank {
  aforge::ShapeBank bank;
};
struct af_anchors {
  aforge::AnchorModel model;
};
struct af_graph {
  aforge::RelationGraph graph;
};
struct af_generator {
  std::unique_ptr<aforge::Generator> gen;
};
struct af_scene {
  aforge::GeneratedScene scene;
  std::string manifest;
};

namespace {

thread_local std::string g_last_error;

af_status to_status(aforge::ErrorCode code) {
  switch (code) {
    case aforge::ErrorCode::kInvalidArgument: return AF_ERR_INVALID_ARGUMENT;
    case aforge::ErrorCode::kIo: return AF_ERR_IO;
    case aforge::ErrorCode::kFormat: return AF_ERR_FORMAT;
    case aforge::ErrorCode::kData: return AF_ERR_DATA;
    case aforge::ErrorCode::kConfig: return AF_ERR_CONFIG;
    case aforge::ErrorCode::kPlacement: return AF_ERR_PLACEMENT;
  }
  return AF_ERR_INTERNAL;
}

template <typename F>
af_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return AF_OK;
  } catch (const aforge::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return AF_ERR_INTERNAL;
}

void require(bool ok, const char* what) {
  if (!ok) throw aforge::Error(aforge::ErrorCode::kInvalidArgument, what);
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<aforge::LabeledSource> read_sources(const char* const* paths, std::size_t n) {
  require(paths != nullptr && n > 0, "no source volumes given");
  std::vector<aforge::LabeledSource> sources;
  for (std::size_t i = 0; i < n; ++i) {
    require(paths[i] != nullptr, "null source path");
    const std::filesystem::path p(paths[i]);
    std::string id = p.filename().string();
    for (const char* ext : {".nii.gz", ".nii"})
      if (id.size() > std::strlen(ext) && id.ends_with(ext)) {
        id.resize(id.size() - std::strlen(ext));
        break;
      }
    sources.push_back({id, aforge::to_label_grid(aforge::read_nifti(paths[i]))});
  }
  return sources;
}

aforge::Label class_label(int class_id, int class_count) {
  if (class_id < 1 || class_id > class_count)
    throw aforge::Error(aforge::ErrorCode::kInvalidArgument, "class id " + std::to_string(class_id) + " outside 1.." +
                                                                  std::to_string(class_count));
  return static_cast<aforge::Label>(class_id);
}

}  // namespace

extern "C" {

const char* af_version(void) { return "1.0.0"; }

const char* af_last_error(void) { return g_last_error.c_str(); }

const char* af_status_name(af_status status) {
  switch (status) {
    case AF_OK: return "ok";
    case AF_ERR_INVALID_ARGUMENT: return "invalid argument";
    case AF_ERR_IO: return "i/o error";
    case AF_ERR_FORMAT: return "format error";
    case AF_ERR_DATA: return "data error";
    case AF_ERR_CONFIG: return "configuration error";
    case AF_ERR_PLACEMENT: return "placement error";
    case AF_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void af_string_free(char* s) { std::free(s); }

void af_buffer_free(void* buffer) { std::free(buffer); }

af_status af_bank_build(const char* const* source_paths, size_t n_sources, const uint8_t* raw_classes,
                        size_t n_classes, size_t min_component, af_bank** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    require(raw_classes != nullptr && n_classes > 0, "no classes given");
    const auto sources = read_sources(source_paths, n_sources);
    auto bank = aforge::build_bank(sources, {raw_classes, n_classes}, min_component);
    *out = new af_bank{std::move(bank)};
  });
}

af_status af_bank_load(const char* path, af_bank** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new af_bank{aforge::load_bank(path)};
  });
}

af_status af_bank_save(const af_bank* bank, const char* path) {
  return guarded([&] {
    require(bank != nullptr && path != nullptr, "null argument");
    aforge::save_bank(bank->bank, path);
  });
}

af_status af_bank_write_class_map(const af_bank* bank, const char* path, const char* const* names) {
  return guarded([&] {
    require(bank != nullptr && path != nullptr, "null argument");
    std::vector<std::string> n(static_cast<std::size_t>(bank->bank.class_count()));
    if (names)
      for (std::size_t i = 0; i < n.size(); ++i)
        if (names[i]) n[i] = names[i];
    aforge::write_text_file(path, aforge::format_class_map(bank->bank, n));
  });
}

int af_bank_class_count(const af_bank* bank) { return bank ? bank->bank.class_count() : 0; }

size_t af_bank_entry_count(const af_bank* bank) { return bank ? bank->bank.entries().size() : 0; }

af_status af_bank_class_info(const af_bank* bank, int class_id, uint8_t* raw_label, size_t* entries,
                             double* mean_voxels) {
  return guarded([&] {
    require(bank != nullptr, "null bank");
    const auto id = class_label(class_id, bank->bank.class_count());
    if (raw_label) *raw_label = bank->bank.class_map().raw_of(id);
    if (entries) *entries = bank->bank.entries_of(id).size();
    if (mean_voxels) *mean_voxels = bank->bank.mean_voxels(id);
  });
}

void af_bank_free(af_bank* bank) { delete bank; }

af_status af_anchors_fit(const char* const* source_paths, size_t n_sources, const uint8_t* raw_classes,
                         size_t n_classes, af_anchors** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    require(raw_classes != nullptr && n_classes > 0, "no classes given");
    const aforge::ClassMap class_map(std::vector<aforge::Label>(raw_classes, raw_classes + n_classes));
    const auto sources = read_sources(source_paths, n_sources);
    *out = new af_anchors{aforge::fit_anchors(sources, class_map)};
  });
}

af_status af_anchors_load(const char* path, af_anchors** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new af_anchors{aforge::load_anchors(path)};
  });
}

af_status af_anchors_save(const af_anchors* anchors, const char* path) {
  return guarded([&] {
    require(anchors != nullptr && path != nullptr, "null argument");
    aforge::save_anchors(anchors->model, path);
  });
}

int af_anchors_class_count(const af_anchors* anchors) { return anchors ? anchors->model.class_count() : 0; }

af_status af_anchors_get(const af_anchors* anchors, int class_id, double* mu, double* sigma, size_t* n_samples) {
  return guarded([&] {
    require(anchors != nullptr, "null anchors");
    const auto& a = anchors->model.at(class_label(class_id, anchors->model.class_count()));
    if (mu)
      for (int i = 0; i < 3; ++i) mu[i] = a.mu[i];
    if (sigma)
      for (int i = 0; i < 9; ++i) sigma[i] = a.sigma[static_cast<std::size_t>(i)];
    if (n_samples) *n_samples = a.n_samples;
  });
}

void af_anchors_free(af_anchors* anchors) { delete anchors; }

af_status af_graph_load(const char* path, int class_count, af_graph** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new af_graph{aforge::load_graph_file(path, class_count)};
  });
}

af_status af_graph_parse(const char* text, int class_count, af_graph** out) {
  return guarded([&] {
    require(text != nullptr && out != nullptr, "null argument");
    *out = new af_graph{aforge::load_graph(text, class_count)};
  });
}

af_status af_graph_serialize(const af_graph* graph, char** text) {
  return guarded([&] {
    require(graph != nullptr && text != nullptr, "null argument");
    *text = duplicate(aforge::serialize_graph(graph->graph));
  });
}

size_t af_graph_edge_count(const af_graph* graph) { return graph ? graph->graph.edges().size() : 0; }

const char* af_graph_class_name(const af_graph* graph, int class_id) {
  if (!graph || class_id < 1 || class_id > graph->graph.class_count()) return nullptr;
  const std::string& name = graph->graph.name_of(static_cast<aforge::Label>(class_id));
  return name.empty() ? nullptr : name.c_str();
}

void af_graph_free(af_graph* graph) { delete graph; }

void af_config_default(af_config* config) {
  if (!config) return;
  const aforge::SynthesisConfig s;
  const aforge::RenderParams r;
  *config = af_config{};
  config->dims[0] = s.dims.x;
  config->dims[1] = s.dims.y;
  config->dims[2] = s.dims.z;
  config->n_candidates = s.n_candidates;
  config->perturb_sigma = s.perturb_sigma;
  config->retries = s.retries;
  config->seed = s.seed;
  config->flip_prob = s.augment.flip_prob;
  config->rotation_enabled = s.augment.rotation_enabled ? 1 : 0;
  config->scale_lo = s.augment.scale_lo;
  config->scale_hi = s.augment.scale_hi;
  config->shell_thickness = r.shell_thickness;
  config->intensity_lo = r.intensity_lo;
  config->intensity_hi = r.intensity_hi;
  config->background = r.background;
  config->noise_sigma = r.noise_sigma;
  config->per_instance_intensity = r.per_instance_intensity ? 1 : 0;
  config->lambda_anchor = config->lambda_overlap = config->lambda_contain = config->lambda_adjacency = -1.0;
  config->tau_in = config->nu_contact = config->tau_hard = -1.0;
  config->instances = nullptr;
  config->n_instances = 0;
}

af_status af_generator_create(const af_bank* bank, const af_anchors* anchors, const af_graph* graph,
                              const af_config* config, af_generator** out) {
  return guarded([&] {
    require(bank && anchors && graph && config && out, "null argument");
    aforge::SynthesisConfig s;
    s.dims = {config->dims[0], config->dims[1], config->dims[2]};
    s.n_candidates = config->n_candidates;
    s.perturb_sigma = config->perturb_sigma;
    s.retries = config->retries;
    s.seed = config->seed;
    s.augment = {config->flip_prob, config->rotation_enabled != 0, config->scale_lo, config->scale_hi};
    const aforge::RelationWeights base = graph->graph.weights();
    const bool any_weight = config->lambda_anchor >= 0 || config->lambda_overlap >= 0 ||
                            config->lambda_contain >= 0 || config->lambda_adjacency >= 0;
    if (any_weight)
      s.weights = aforge::RelationWeights{config->lambda_anchor >= 0 ? config->lambda_anchor : base.anchor,
                                          config->lambda_overlap >= 0 ? config->lambda_overlap : base.overlap,
                                          config->lambda_contain >= 0 ? config->lambda_contain : base.contain,
                                          config->lambda_adjacency >= 0 ? config->lambda_adjacency : base.adjacency};
    if (config->tau_in >= 0) s.tau_in = config->tau_in;
    if (config->nu_contact >= 0) s.nu_contact = config->nu_contact;
    if (config->tau_hard >= 0) s.tau_hard = config->tau_hard;
    if (config->instances) {
      require(config->n_instances <= 255, "instance schedule longer than 255 classes");
      for (std::size_t i = 0; i < config->n_instances; ++i)
        s.instances[static_cast<aforge::Label>(i + 1)] = config->instances[i];
    }
    aforge::RenderParams r;
    r.shell_thickness = config->shell_thickness;
    r.intensity_lo = static_cast<float>(config->intensity_lo);
    r.intensity_hi = static_cast<float>(config->intensity_hi);
    r.background = static_cast<float>(config->background);
    r.noise_sigma = config->noise_sigma;
    r.per_instance_intensity = config->per_instance_intensity != 0;
    auto gen = std::make_unique<aforge::Generator>(bank->bank, anchors->model, graph->graph, s, r);
    *out = new af_generator{std::move(gen)};
  });
}

void af_generator_free(af_generator* generator) { delete generator; }

af_status af_generator_run(const af_generator* generator, uint64_t index, af_scene** out) {
  return guarded([&] {
    require(generator != nullptr && out != nullptr, "null argument");
    auto scene = std::make_unique<af_scene>();
    scene->scene = generator->gen->generate(index);
    scene->manifest = scene->scene.manifest.dump();
    *out = scene.release();
  });
}

af_status af_generator_write_index(const af_generator* generator, const char* dir, uint64_t count) {
  return guarded([&] {
    require(generator != nullptr && dir != nullptr, "null argument");
    const auto path = std::filesystem::path(dir) / "dataset.json";
    aforge::write_text_file(path.string(), generator->gen->dataset_index(count).dump(2) + "\n");
  });
}

af_status af_scene_dims(const af_scene* scene, int dims[3]) {
  return guarded([&] {
    require(scene != nullptr && dims != nullptr, "null argument");
    const auto& d = scene->scene.scene.dims();
    dims[0] = d.x;
    dims[1] = d.y;
    dims[2] = d.z;
  });
}

size_t af_scene_placement_count(const af_scene* scene) { return scene ? scene->scene.scene.placements().size() : 0; }

size_t af_scene_skip_count(const af_scene* scene) { return scene ? scene->scene.scene.skips().size() : 0; }

af_status af_scene_copy_labels(const af_scene* scene, uint8_t* buffer, size_t len) {
  return guarded([&] {
    require(scene != nullptr && buffer != nullptr, "null argument");
    const auto values = scene->scene.labels.values();
    require(len == values.size(), "buffer length does not match the scene size");
    std::memcpy(buffer, values.data(), values.size_bytes());
  });
}

af_status af_scene_copy_image(const af_scene* scene, float* buffer, size_t len) {
  return guarded([&] {
    require(scene != nullptr && buffer != nullptr, "null argument");
    const auto values = scene->scene.image.values();
    require(len == values.size(), "buffer length does not match the scene size");
    std::memcpy(buffer, values.data(), values.size_bytes());
  });
}

const char* af_scene_manifest(const af_scene* scene) { return scene ? scene->manifest.c_str() : nullptr; }

af_status af_scene_write(const af_scene* scene, const char* dir) {
  return guarded([&] {
    require(scene != nullptr && dir != nullptr, "null argument");
    aforge::write_scene_files(scene->scene, dir);
  });
}

void af_scene_free(af_scene* scene) { delete scene; }

af_status af_validate_dir(const char* dir, const af_graph* graph, char** report_json, size_t* hard_violations) {
  return guarded([&] {
    require(dir != nullptr && graph != nullptr && report_json != nullptr, "null argument");
    const auto report = aforge::validate_directory(dir, graph->graph);
    if (hard_violations) *hard_violations = report.at("hard_violations").get<std::size_t>();
    *report_json = duplicate(report.dump(2));
  });
}

af_status af_stats_dir(const char* dir, const af_anchors* anchors, char** report_json) {
  return guarded([&] {
    require(dir != nullptr && anchors != nullptr && report_json != nullptr, "null argument");
    *report_json = duplicate(aforge::centroid_report(dir, anchors->model).dump(2));
  });
}

af_status af_nifti_read_labels(const char* path, int dims[3], uint8_t** labels) {
  return guarded([&] {
    require(path != nullptr && dims != nullptr && labels != nullptr, "null argument");
    const auto grid = aforge::to_label_grid(aforge::read_nifti(path));
    auto* buf = static_cast<uint8_t*>(std::malloc(grid.size()));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, grid.values().data(), grid.size());
    dims[0] = grid.dims().x;
    dims[1] = grid.dims().y;
    dims[2] = grid.dims().z;
    *labels = buf;
  });
}

af_status af_phantoms_write(const char* dir, int subjects, uint64_t seed) {
  return guarded([&] {
    require(dir != nullptr, "null argument");
    require(subjects >= 1 && subjects <= 99, "subject count must be in 1..99");
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(dir);
    for (auto& src : aforge::make_phantom_corpus(subjects, seed))
      aforge::write_nifti(aforge::make_label_volume(std::move(src.labels)), (base / (src.id + ".nii.gz")).string());
    std::string classes = "# raw_label name\n";
    for (const auto& o : aforge::phantom_organs()) classes += std::to_string(o.raw) + ' ' + o.name + '\n';
    aforge::write_text_file((base / "classes.txt").string(), classes);
  });
}

}  // extern "C"
