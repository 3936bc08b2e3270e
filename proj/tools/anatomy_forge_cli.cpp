// anatomy-forge: command-line front end over the C API.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "anatomy_forge/anatomy_forge.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitValidation = 3;

// Thrown for any failure; carries the exit code.
struct Failure {
  int code;
  std::string message;
};

[[noreturn]] void usage_error(const std::string& message) { throw Failure{kExitUsage, message}; }
[[noreturn]] void data_error(const std::string& message) { throw Failure{kExitData, message}; }

void check(af_status status) {
  if (status == AF_OK) return;
  const int code = (status == AF_ERR_INVALID_ARGUMENT || status == AF_ERR_CONFIG) ? kExitUsage : kExitData;
  throw Failure{code, std::string(af_status_name(status)) + ": " + af_last_error()};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using BankPtr = std::unique_ptr<af_bank, Deleter<af_bank, af_bank_free>>;
using AnchorsPtr = std::unique_ptr<af_anchors, Deleter<af_anchors, af_anchors_free>>;
using GraphPtr = std::unique_ptr<af_graph, Deleter<af_graph, af_graph_free>>;
using GeneratorPtr = std::unique_ptr<af_generator, Deleter<af_generator, af_generator_free>>;
using ScenePtr = std::unique_ptr<af_scene, Deleter<af_scene, af_scene_free>>;

std::string take_string(char* s) {
  std::string out(s);
  af_string_free(s);
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

long to_long(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  usage_error(what + ": '" + s + "' is not an integer");
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  usage_error(what + ": '" + s + "' is not a number");
}

std::pair<double, double> parse_range(const std::string& s, const std::string& what) {
  const auto parts = split(s, ',');
  if (parts.size() != 2) usage_error(what + ": expected LO,HI");
  return {to_double(parts[0], what), to_double(parts[1], what)};
}

// Directories expand to every .nii / .nii.gz file inside, sorted by name.
std::vector<std::string> expand_sources(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (const auto& a : args) {
    if (fs::is_directory(a)) {
      std::vector<std::string> found;
      for (const auto& e : fs::directory_iterator(a)) {
        const std::string name = e.path().filename().string();
        if (e.is_regular_file() && (name.ends_with(".nii") || name.ends_with(".nii.gz")))
          found.push_back(e.path().string());
      }
      std::sort(found.begin(), found.end());
      if (found.empty()) data_error("no .nii/.nii.gz files in '" + a + "'");
      out.insert(out.end(), found.begin(), found.end());
    } else if (fs::exists(a)) {
      out.push_back(a);
    } else {
      data_error("source not found: '" + a + "'");
    }
  }
  return out;
}

struct ClassSpec {
  std::vector<std::uint8_t> raw;
  std::vector<std::string> names;  // parallel to raw, possibly empty strings
};

// Either a comma-separated list of raw labels or a file with one
// `raw_label [name]` row per class.
ClassSpec parse_classes(const std::string& arg) {
  ClassSpec spec;
  auto add = [&](const std::string& token, std::string name) {
    const long v = to_long(token, "--classes");
    if (v < 1 || v > 255) usage_error("--classes: label " + token + " outside 1..255");
    spec.raw.push_back(static_cast<std::uint8_t>(v));
    spec.names.push_back(std::move(name));
  };
  if (fs::is_regular_file(arg)) {
    std::ifstream in(arg);
    std::string line;
    while (std::getline(in, line)) {
      if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      std::istringstream row(line);
      std::string raw, name;
      if (!(row >> raw)) continue;
      row >> name;
      add(raw, name);
    }
  } else {
    for (const auto& t : split(arg, ','))
      if (!t.empty()) add(t, "");
  }
  if (spec.raw.empty()) usage_error("--classes: no classes given");
  return spec;
}

// Names in class-id order (ascending raw label).
std::vector<std::string> names_by_id(const ClassSpec& spec) {
  std::vector<std::size_t> order(spec.raw.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return spec.raw[a] < spec.raw[b]; });
  std::vector<std::string> out;
  for (const std::size_t i : order) out.push_back(spec.names[i]);
  return out;
}

std::vector<const char*> c_strings(const std::vector<std::string>& v) {
  std::vector<const char*> out;
  for (const auto& s : v) out.push_back(s.c_str());
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) data_error("cannot write '" + path + "'");
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) data_error("cannot read '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    data_error(path + ": " + e.what());
  }
}

// ---- build-bank ----------------------------------------------------------

struct BankArgs {
  std::vector<std::string> sources;
  std::string classes;
  std::string out;
  std::size_t min_component = 8;
};

int run_build_bank(const BankArgs& a) {
  const ClassSpec spec = parse_classes(a.classes);
  const auto files = expand_sources(a.sources);
  const auto paths = c_strings(files);
  af_bank* raw = nullptr;
  check(af_bank_build(paths.data(), paths.size(), spec.raw.data(), spec.raw.size(), a.min_component, &raw));
  BankPtr bank(raw);
  check(af_bank_save(bank.get(), a.out.c_str()));
  const auto names = names_by_id(spec);
  const auto name_ptrs = c_strings(names);
  const std::string sidecar = a.out + ".classes.txt";
  check(af_bank_write_class_map(bank.get(), sidecar.c_str(), name_ptrs.data()));

  std::printf("%-6s %-4s %-32s %8s %12s\n", "raw", "id", "name", "entries", "mean_voxels");
  for (int id = 1; id <= af_bank_class_count(bank.get()); ++id) {
    std::uint8_t r = 0;
    std::size_t n = 0;
    double mean = 0.0;
    check(af_bank_class_info(bank.get(), id, &r, &n, &mean));
    const std::string& name = names[static_cast<std::size_t>(id - 1)];
    std::printf("%-6u %-4d %-32s %8zu %12.1f\n", r, id, name.empty() ? "-" : name.c_str(), n, mean);
  }
  std::printf("bank: %d classes, %zu entries from %zu sources -> %s (class map %s)\n",
              af_bank_class_count(bank.get()), af_bank_entry_count(bank.get()), files.size(), a.out.c_str(),
              sidecar.c_str());
  return kExitOk;
}

// ---- fit-anchors ---------------------------------------------------------

struct AnchorArgs {
  std::vector<std::string> sources;
  std::string classes;
  std::string out;
};

int run_fit_anchors(const AnchorArgs& a) {
  const ClassSpec spec = parse_classes(a.classes);
  const auto files = expand_sources(a.sources);
  const auto paths = c_strings(files);
  af_anchors* raw = nullptr;
  check(af_anchors_fit(paths.data(), paths.size(), spec.raw.data(), spec.raw.size(), &raw));
  AnchorsPtr anchors(raw);
  check(af_anchors_save(anchors.get(), a.out.c_str()));
  std::printf("%-4s %8s %8s %8s %8s\n", "id", "mu_x", "mu_y", "mu_z", "n");
  for (int id = 1; id <= af_anchors_class_count(anchors.get()); ++id) {
    double mu[3];
    std::size_t n = 0;
    check(af_anchors_get(anchors.get(), id, mu, nullptr, &n));
    std::printf("%-4d %8.4f %8.4f %8.4f %8zu\n", id, mu[0], mu[1], mu[2], n);
  }
  std::printf("anchors: %d classes from %zu sources -> %s\n", af_anchors_class_count(anchors.get()), files.size(),
              a.out.c_str());
  return kExitOk;
}

// ---- synthesize ----------------------------------------------------------

struct SynthArgs {
  std::string bank, anchors, graph, out_dir;
  std::uint64_t count = 1;
  af_config config{};
  std::string dims = "128,128,128";
  std::string scale_range = "0.85,1.25";
  std::string intensity_range = "0.3,1.0";
  bool no_rotation = false;
  bool uniform_intensity = false;
  std::string instances;
  int jobs = 0;
};

int default_jobs() {
  if (const char* env = std::getenv("ANATOMY_FORGE_JOBS"); env && *env) {
    const long v = to_long(env, "ANATOMY_FORGE_JOBS");
    if (v < 1) usage_error("ANATOMY_FORGE_JOBS must be >= 1");
    return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int run_synthesize(SynthArgs a) {
  af_config& c = a.config;
  const auto d = split(a.dims, ',');
  if (d.size() != 3) usage_error("--dims: expected X,Y,Z");
  for (int i = 0; i < 3; ++i) c.dims[i] = static_cast<int>(to_long(d[static_cast<std::size_t>(i)], "--dims"));
  std::tie(c.scale_lo, c.scale_hi) = parse_range(a.scale_range, "--scale-range");
  std::tie(c.intensity_lo, c.intensity_hi) = parse_range(a.intensity_range, "--intensity-range");
  c.rotation_enabled = a.no_rotation ? 0 : 1;
  c.per_instance_intensity = a.uniform_intensity ? 0 : 1;
  if (a.jobs < 0) usage_error("--jobs must be >= 1");
  const int jobs = a.jobs > 0 ? a.jobs : default_jobs();

  af_bank* bank_raw = nullptr;
  check(af_bank_load(a.bank.c_str(), &bank_raw));
  BankPtr bank(bank_raw);
  const int classes = af_bank_class_count(bank.get());

  std::vector<int> instances;
  if (!a.instances.empty()) {
    instances.assign(static_cast<std::size_t>(classes), 1);
    for (const auto& item : split(a.instances, ',')) {
      const auto kv = split(item, ':');
      if (kv.size() != 2) usage_error("--instances: expected ID:COUNT pairs");
      const long id = to_long(kv[0], "--instances");
      if (id < 1 || id > classes) usage_error("--instances: class " + kv[0] + " outside 1.." + std::to_string(classes));
      instances[static_cast<std::size_t>(id - 1)] = static_cast<int>(to_long(kv[1], "--instances"));
    }
    c.instances = instances.data();
    c.n_instances = instances.size();
  }

  af_anchors* anchors_raw = nullptr;
  check(af_anchors_load(a.anchors.c_str(), &anchors_raw));
  AnchorsPtr anchors(anchors_raw);
  af_graph* graph_raw = nullptr;
  check(af_graph_load(a.graph.c_str(), classes, &graph_raw));
  GraphPtr graph(graph_raw);
  af_generator* gen_raw = nullptr;
  check(af_generator_create(bank.get(), anchors.get(), graph.get(), &c, &gen_raw));
  GeneratorPtr gen(gen_raw);

  std::error_code ec;
  fs::create_directories(a.out_dir, ec);
  if (ec || !fs::is_directory(a.out_dir)) data_error("cannot create output directory '" + a.out_dir + "'");

  std::atomic<std::uint64_t> next{0};
  std::atomic<std::size_t> placements{0}, skips{0};
  std::atomic<bool> stop{false};
  std::mutex error_mutex;
  std::optional<Failure> first_error;

  const auto start = std::chrono::steady_clock::now();
  auto worker = [&] {
    try {
      for (std::uint64_t i = next++; i < a.count && !stop; i = next++) {
        af_scene* scene_raw = nullptr;
        check(af_generator_run(gen.get(), i, &scene_raw));
        ScenePtr scene(scene_raw);
        check(af_scene_write(scene.get(), a.out_dir.c_str()));
        placements += af_scene_placement_count(scene.get());
        skips += af_scene_skip_count(scene.get());
      }
    } catch (const Failure& f) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = f;
      stop = true;
    }
  };
  const int threads = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(jobs), std::max<std::uint64_t>(a.count, 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (first_error) throw *first_error;

  check(af_generator_write_index(gen.get(), a.out_dir.c_str(), a.count));
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("synthesized %llu scenes (%zu placements, %zu skipped instances) in %.2f s on %d thread%s: %.2f volumes/s\n",
              static_cast<unsigned long long>(a.count), placements.load(), skips.load(), seconds, threads,
              threads == 1 ? "" : "s",
              seconds > 0 ? static_cast<double>(a.count) / seconds : 0.0);
  return kExitOk;
}

// ---- validate / stats ----------------------------------------------------

int scene_class_count(const std::string& dir) {
  if (!fs::is_directory(dir)) data_error("not a directory: '" + dir + "'");
  std::vector<fs::path> manifests;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.starts_with("scene_") && name.ends_with(".json")) manifests.push_back(e.path());
  }
  if (manifests.empty()) data_error("no scene manifests (scene_*.json) in '" + dir + "'");
  std::sort(manifests.begin(), manifests.end());
  const json m = read_json(manifests.front().string());
  if (!m.contains("class_count")) data_error(manifests.front().string() + ": missing class_count");
  return m.at("class_count").get<int>();
}

std::string fmt_rate(const json& r) {
  char buf[96];
  if (r.at("rate").is_null())
    std::snprintf(buf, sizeof(buf), "n/a (0 checked)");
  else
    std::snprintf(buf, sizeof(buf), "%.3f (%zu/%zu)", r.at("rate").get<double>(), r.at("satisfied").get<std::size_t>(),
                  r.at("checked").get<std::size_t>());
  return buf;
}

int run_validate(const std::string& dir, const std::string& graph_path, const std::string& json_out) {
  const int classes = scene_class_count(dir);
  af_graph* graph_raw = nullptr;
  check(af_graph_load(graph_path.c_str(), classes, &graph_raw));
  GraphPtr graph(graph_raw);
  char* text = nullptr;
  std::size_t hard = 0;
  check(af_validate_dir(dir.c_str(), graph.get(), &text, &hard));
  const std::string report_text = take_string(text);
  if (!json_out.empty()) write_text(json_out, report_text + "\n");
  const json r = json::parse(report_text);

  std::printf("scenes:                %zu\n", r.at("scenes").get<std::size_t>());
  std::printf("placements:            %zu\n", r.at("placements").get<std::size_t>());
  std::printf("skipped instances:     %zu\n", r.at("skips").get<std::size_t>());
  std::printf("exclusion violations:  %zu\n", r.at("exclusion_violations").size());
  std::printf("label mismatches:      %zu\n", r.at("label_mismatches").size());
  std::printf("containment satisfied: %s\n", fmt_rate(r.at("containment")).c_str());
  std::printf("adjacency satisfied:   %s\n", fmt_rate(r.at("adjacency")).c_str());
  std::printf("unreferenced edges:    %zu\n", r.at("unreferenced_edges").get<std::size_t>());
  const json& res = r.at("anchor_residual");
  if (!res.at("mean").is_null())
    std::printf("anchor residual:       mean %.4f, max %.4f\n", res.at("mean").get<double>(), res.at("max").get<double>());
  for (const auto& v : r.at("exclusion_violations"))
    std::printf("  violation: scene %zu step %zu class %d vs %d IoU %.4f > %.4f\n", v.at("scene").get<std::size_t>(),
                v.at("step").get<std::size_t>(), v.at("class_id").get<int>(), v.at("other").get<int>(),
                v.at("iou").get<double>(), v.at("tau_hard").get<double>());
  for (const auto& m : r.at("label_mismatches"))
    std::printf("  mismatch: scene %zu: %s\n", m.at("scene").get<std::size_t>(), m.at("reason").get<std::string>().c_str());
  if (hard > 0) {
    std::printf("FAILED: %zu hard violations\n", hard);
    return kExitValidation;
  }
  std::printf("OK: no hard violations\n");
  return kExitOk;
}

int run_stats(const std::string& dir, const std::string& anchors_path, const std::string& json_out) {
  af_anchors* anchors_raw = nullptr;
  check(af_anchors_load(anchors_path.c_str(), &anchors_raw));
  AnchorsPtr anchors(anchors_raw);
  char* text = nullptr;
  check(af_stats_dir(dir.c_str(), anchors.get(), &text));
  const std::string report_text = take_string(text);
  if (!json_out.empty()) write_text(json_out, report_text + "\n");
  const json r = json::parse(report_text);

  std::printf("scenes: %zu%s\n", r.at("scenes").get<std::size_t>(), r.at("low_n").get<bool>() ? " (low n)" : "");
  std::printf("%-4s %6s %8s %8s %8s %8s %8s %8s %9s\n", "id", "n", "mean_x", "mean_y", "mean_z", "mu_x", "mu_y", "mu_z",
              "max_diff");
  for (const auto& c : r.at("classes")) {
    const auto& mu = c.at("mu");
    if (c.at("mean").is_null()) {
      std::printf("%-4d %6zu %8s %8s %8s %8.4f %8.4f %8.4f %9s\n", c.at("class_id").get<int>(), c.at("n").get<std::size_t>(),
                  "-", "-", "-", mu[0].get<double>(), mu[1].get<double>(), mu[2].get<double>(), "-");
      continue;
    }
    const auto& m = c.at("mean");
    std::printf("%-4d %6zu %8.4f %8.4f %8.4f %8.4f %8.4f %8.4f %9.4f\n", c.at("class_id").get<int>(),
                c.at("n").get<std::size_t>(), m[0].get<double>(), m[1].get<double>(), m[2].get<double>(),
                mu[0].get<double>(), mu[1].get<double>(), mu[2].get<double>(), c.at("max_abs_diff").get<double>());
  }
  for (const auto& w : r.at("warnings")) std::printf("warning: %s\n", w.get<std::string>().c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anatomy-forge: anatomy-informed synthetic label/image volume generator"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", af_version());

  BankArgs bank_args;
  auto* bank_cmd = app.add_subcommand("build-bank", "Extract a shape bank from label volumes");
  bank_cmd->add_option("--sources", bank_args.sources, "Label volumes (.nii/.nii.gz) or directories of them")
      ->required();
  bank_cmd->add_option("--classes", bank_args.classes, "Raw labels to keep: comma list or file of `raw [name]` rows")
      ->required();
  bank_cmd->add_option("--out", bank_args.out, "Output bank file; the class map goes to <out>.classes.txt")->required();
  bank_cmd->add_option("--min-component", bank_args.min_component, "Drop components smaller than this (voxels)");

  AnchorArgs anchor_args;
  auto* anchor_cmd = app.add_subcommand("fit-anchors", "Fit per-class centroid Gaussians");
  anchor_cmd->add_option("--sources", anchor_args.sources, "Label volumes or directories of them")->required();
  anchor_cmd->add_option("--classes", anchor_args.classes, "Raw labels: comma list or class file")->required();
  anchor_cmd->add_option("--out", anchor_args.out, "Output anchor table")->required();

  SynthArgs synth;
  af_config_default(&synth.config);
  af_config& c = synth.config;
  auto* synth_cmd = app.add_subcommand("synthesize", "Generate image/label pairs");
  synth_cmd->add_option("--bank", synth.bank, "Shape bank file")->required();
  synth_cmd->add_option("--anchors", synth.anchors, "Anchor table")->required();
  synth_cmd->add_option("--graph", synth.graph, "Relation graph config")->required();
  synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory")->required();
  synth_cmd->add_option("--count", synth.count, "Number of scenes");
  synth_cmd->add_option("--seed", c.seed, "Master seed; scene i uses stream (seed, i)");
  synth_cmd->add_option("--dims", synth.dims, "Scene size X,Y,Z (each >= 32)");
  synth_cmd->add_option("--n-candidates", c.n_candidates, "Candidate poses per instance");
  synth_cmd->add_option("--perturb-sigma", c.perturb_sigma, "Std-dev of candidate offsets (normalized units)");
  synth_cmd->add_option("--retries", c.retries, "Fresh anchors tried before an instance is skipped");
  synth_cmd->add_option("--instances", synth.instances, "Instances per class as ID:COUNT,... (others: 1)");
  synth_cmd->add_option("--flip-prob", c.flip_prob, "Per-axis flip probability");
  synth_cmd->add_flag("--no-rotation", synth.no_rotation, "Disable the 24 axis-aligned rotations");
  synth_cmd->add_option("--scale-range", synth.scale_range, "Isotropic scale factor range LO,HI");
  synth_cmd->add_option("--lambda-anchor", c.lambda_anchor, "Anchor weight override (negative: graph value, 1.0)");
  synth_cmd->add_option("--lambda-overlap", c.lambda_overlap, "Overlap weight override (negative: graph value, 1.0)");
  synth_cmd->add_option("--lambda-contain", c.lambda_contain,
                        "Containment weight override (negative: graph value, 1.0)");
  synth_cmd->add_option("--lambda-adjacency", c.lambda_adjacency,
                        "Adjacency weight override (negative: graph value, 0.8)");
  synth_cmd->add_option("--tau-in", c.tau_in, "Containment ratio threshold override (negative: graph value, 0.30)");
  synth_cmd->add_option("--nu-contact", c.nu_contact, "Contact voxel threshold override (negative: graph value, 20)");
  synth_cmd->add_option("--tau-hard", c.tau_hard, "Exclusion IoU threshold override (negative: graph value, 0.35)");
  synth_cmd->add_option("--shell-thickness", c.shell_thickness, "Contour shell thickness in voxels");
  synth_cmd->add_option("--intensity-range", synth.intensity_range, "Per-instance intensity range LO,HI");
  synth_cmd->add_option("--background", c.background, "Background intensity");
  synth_cmd->add_option("--noise-sigma", c.noise_sigma, "Additive Gaussian noise std-dev");
  synth_cmd->add_flag("--uniform-intensity", synth.uniform_intensity,
                      "Use the midpoint of the intensity range for every instance");
  synth_cmd->add_option("--jobs", synth.jobs, "Worker threads (0: $ANATOMY_FORGE_JOBS, else all cores)");

  std::string validate_dir, validate_graph, validate_json;
  auto* validate_cmd = app.add_subcommand("validate", "Check generated scenes against the relation graph");
  validate_cmd->add_option("--scenes", validate_dir, "Directory written by synthesize")->required();
  validate_cmd->add_option("--graph", validate_graph, "Relation graph config")->required();
  validate_cmd->add_option("--json", validate_json, "Also write the full report here");

  std::string stats_dir, stats_anchors, stats_json;
  auto* stats_cmd = app.add_subcommand("stats", "Compare generated centroid statistics with the anchor table");
  stats_cmd->add_option("--scenes", stats_dir, "Directory written by synthesize")->required();
  stats_cmd->add_option("--anchors", stats_anchors, "Anchor table")->required();
  stats_cmd->add_option("--json", stats_json, "Also write the full report here");

  std::string phantom_dir;
  int phantom_subjects = 5;
  std::uint64_t phantom_seed = 0;
  auto* phantom_cmd = app.add_subcommand("make-phantoms", "Write a procedural demo corpus of label volumes");
  phantom_cmd->add_option("--out-dir", phantom_dir, "Output directory")->required();
  phantom_cmd->add_option("--subjects", phantom_subjects, "Number of subjects");
  phantom_cmd->add_option("--seed", phantom_seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*bank_cmd) return run_build_bank(bank_args);
    if (*anchor_cmd) return run_fit_anchors(anchor_args);
    if (*synth_cmd) return run_synthesize(synth);
    if (*validate_cmd) return run_validate(validate_dir, validate_graph, validate_json);
    if (*stats_cmd) return run_stats(stats_dir, stats_anchors, stats_json);
    if (*phantom_cmd) {
      check(af_phantoms_write(phantom_dir.c_str(), phantom_subjects, phantom_seed));
      std::printf("wrote %d phantom subjects and classes.txt to %s\n", phantom_subjects, phantom_dir.c_str());
      return kExitOk;
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "anatomy-forge: %s\n", f.message.c_str());
    return f.code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "anatomy-forge: %s\n", e.what());
    return kExitData;
  }
  return kExitUsage;
}
