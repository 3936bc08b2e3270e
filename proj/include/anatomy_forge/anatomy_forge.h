/*
 * anatomy_forge.h - C interface to the anatomy-forge synthetic volume
 * generator.
 *
 * All objects are opaque handles created by an af_*_create/build/load call and
 * released with the matching af_*_free. Functions return an af_status; on
 * failure af_last_error() describes the problem (thread-local, valid until
 * the next call on the same thread).
 *
 * Voxel buffers use x-fastest order: index = x + nx * (y + ny * z).
 */
#ifndef ANATOMY_FORGE_H
#define ANATOMY_FORGE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ANATOMY_FORGE_BUILD)
#    define AF_API __declspec(dllexport)
#  else
#    define AF_API __declspec(dllimport)
#  endif
#else
#  define AF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum af_status {
  AF_OK = 0,
  AF_ERR_INVALID_ARGUMENT = 1,
  AF_ERR_IO = 2,
  AF_ERR_FORMAT = 3,
  AF_ERR_DATA = 4,
  AF_ERR_CONFIG = 5,
  AF_ERR_PLACEMENT = 6,
  AF_ERR_INTERNAL = 7
} af_status;

typedef struct af_bank af_bank;
typedef struct af_anchors af_anchors;
typedef struct af_graph af_graph;
typedef struct af_generator af_generator;
typedef struct af_scene af_scene;

AF_API const char* af_version(void);
AF_API const char* af_last_error(void);
AF_API const char* af_status_name(af_status status);

/* Strings returned through char** out-parameters are owned by the caller. */
AF_API void af_string_free(char* s);

/* ---- shape bank -------------------------------------------------------- */

/* Builds a bank from label volumes (.nii / .nii.gz). `raw_classes` lists the
 * source labels to keep; they are remapped to 1..C in ascending order.
 * Components smaller than `min_component` voxels are dropped. */
AF_API af_status af_bank_build(const char* const* source_paths, size_t n_sources, const uint8_t* raw_classes,
                               size_t n_classes, size_t min_component, af_bank** out);
AF_API af_status af_bank_load(const char* path, af_bank** out);
AF_API af_status af_bank_save(const af_bank* bank, const char* path);
/* Plaintext class map sidecar. `names` may be NULL or hold class_count
 * entries (NULL entries allowed). */
AF_API af_status af_bank_write_class_map(const af_bank* bank, const char* path, const char* const* names);
AF_API int af_bank_class_count(const af_bank* bank);
AF_API size_t af_bank_entry_count(const af_bank* bank);
AF_API af_status af_bank_class_info(const af_bank* bank, int class_id, uint8_t* raw_label, size_t* entries,
                                    double* mean_voxels);
AF_API void af_bank_free(af_bank* bank);

/* ---- anchors ----------------------------------------------------------- */

/* Fits per-class centroid Gaussians. Class ids are assigned to `raw_classes`
 * in ascending order, exactly as af_bank_build does. */
AF_API af_status af_anchors_fit(const char* const* source_paths, size_t n_sources, const uint8_t* raw_classes,
                                size_t n_classes, af_anchors** out);
AF_API af_status af_anchors_load(const char* path, af_anchors** out);
AF_API af_status af_anchors_save(const af_anchors* anchors, const char* path);
AF_API int af_anchors_class_count(const af_anchors* anchors);
/* mu: 3 doubles, sigma: 9 doubles row-major; any pointer may be NULL. */
AF_API af_status af_anchors_get(const af_anchors* anchors, int class_id, double* mu, double* sigma,
                                size_t* n_samples);
AF_API void af_anchors_free(af_anchors* anchors);

/* ---- relation graph ---------------------------------------------------- */

AF_API af_status af_graph_load(const char* path, int class_count, af_graph** out);
AF_API af_status af_graph_parse(const char* text, int class_count, af_graph** out);
AF_API af_status af_graph_serialize(const af_graph* graph, char** text);
AF_API size_t af_graph_edge_count(const af_graph* graph);
/* Name declared for a class, or NULL. Valid for the graph's lifetime. */
AF_API const char* af_graph_class_name(const af_graph* graph, int class_id);
AF_API void af_graph_free(af_graph* graph);

/* ---- generator --------------------------------------------------------- */

typedef struct af_config {
  int dims[3];
  int n_candidates;
  double perturb_sigma;
  int retries;
  uint64_t seed;
  /* augmentation */
  double flip_prob;
  int rotation_enabled;
  double scale_lo;
  double scale_hi;
  /* rendering */
  int shell_thickness;
  double intensity_lo;
  double intensity_hi;
  double background;
  double noise_sigma;
  int per_instance_intensity;
  /* overrides: a negative value keeps the relation graph's setting */
  double lambda_anchor;
  double lambda_overlap;
  double lambda_contain;
  double lambda_adjacency;
  double tau_in;
  double nu_contact;
  double tau_hard;
  /* instances per class id (index 0 is class 1); NULL means one each */
  const int* instances;
  size_t n_instances;
} af_config;

/* Fills `config` with the defaults: 128^3, 40 candidates, sigma 0.12,
 * 5 retries, flip 0.5, rotations on, scale [0.85, 1.25], shell 1,
 * intensity [0.3, 1.0], background 0, noise 0.02, no overrides. */
AF_API void af_config_default(af_config* config);

/* The generator copies what it needs; the inputs may be freed afterwards. */
AF_API af_status af_generator_create(const af_bank* bank, const af_anchors* anchors, const af_graph* graph,
                                     const af_config* config, af_generator** out);
AF_API void af_generator_free(af_generator* generator);

/* Synthesizes scene `index`; a pure function of (generator, index), safe to
 * call from several threads on one generator. */
AF_API af_status af_generator_run(const af_generator* generator, uint64_t index, af_scene** out);
/* Writes dataset.json indexing scenes 0..count-1 into `dir`. */
AF_API af_status af_generator_write_index(const af_generator* generator, const char* dir, uint64_t count);

AF_API af_status af_scene_dims(const af_scene* scene, int dims[3]);
AF_API size_t af_scene_placement_count(const af_scene* scene);
AF_API size_t af_scene_skip_count(const af_scene* scene);
/* `len` is the buffer length in elements and must equal nx*ny*nz. */
AF_API af_status af_scene_copy_labels(const af_scene* scene, uint8_t* buffer, size_t len);
AF_API af_status af_scene_copy_image(const af_scene* scene, float* buffer, size_t len);
/* JSON manifest, valid for the scene's lifetime. */
AF_API const char* af_scene_manifest(const af_scene* scene);
/* img_%06d.nii, lab_%06d.nii and scene_%06d.json into `dir`. */
AF_API af_status af_scene_write(const af_scene* scene, const char* dir);
AF_API void af_scene_free(af_scene* scene);

/* ---- dataset checks ---------------------------------------------------- */

/* JSON report over every scene in `dir`; *hard_violations receives the
 * number of exclusion violations plus label mismatches. */
AF_API af_status af_validate_dir(const char* dir, const af_graph* graph, char** report_json,
                                 size_t* hard_violations);
/* JSON report of per-class centroid statistics against the anchor table. */
AF_API af_status af_stats_dir(const char* dir, const af_anchors* anchors, char** report_json);

/* ---- NIfTI helpers ----------------------------------------------------- */

AF_API af_status af_nifti_read_labels(const char* path, int dims[3], uint8_t** labels);
AF_API void af_buffer_free(void* buffer);

/* ---- procedural demo corpus -------------------------------------------- */

/* Writes `subjects` phantom label volumes (phantom_XX.nii.gz) and a class
 * list (classes.txt: raw label and name per line) into `dir`. */
AF_API af_status af_phantoms_write(const char* dir, int subjects, uint64_t seed);

#ifdef __cplusplus
}
#endif

#endif /* ANATOMY_FORGE_H */
