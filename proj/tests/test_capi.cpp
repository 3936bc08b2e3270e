// Exercises the shared library through its C header only.
#include <doctest.h>

#include <anatomy_forge/anatomy_forge.h>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Corpus {
  fs::path dir;
  std::vector<std::string> paths;
  std::vector<const char*> ptrs;
};

// Three phantom subjects, written once per process.
const Corpus& corpus() {
  static Corpus c = [] {
    Corpus k;
    k.dir = fs::temp_directory_path() / "af_capi_tests" / "corpus";
    fs::remove_all(k.dir);
    fs::create_directories(k.dir);
    REQUIRE(af_phantoms_write(k.dir.string().c_str(), 3, 4) == AF_OK);
    for (int i = 0; i < 3; ++i) k.paths.push_back((k.dir / ("phantom_0" + std::to_string(i) + ".nii.gz")).string());
    for (const auto& p : k.paths) k.ptrs.push_back(p.c_str());
    return k;
  }();
  return c;
}

// spleen, kidney_right, kidney_left, liver in the phantom numbering
const std::uint8_t kRaw[4] = {1, 2, 3, 5};

fs::path fresh_dir(const char* name) {
  const fs::path d = fs::temp_directory_path() / "af_capi_tests" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

af_config small_config() {
  af_config c;
  af_config_default(&c);
  c.dims[0] = c.dims[1] = c.dims[2] = 64;
  c.n_candidates = 12;
  c.seed = 17;
  return c;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(af_version()) == "1.0.0");
  CHECK(std::string(af_status_name(AF_OK)) == "ok");
  CHECK(std::string(af_status_name(AF_ERR_PLACEMENT)).size() > 0);
  CHECK(std::string(af_status_name(static_cast<af_status>(99))).size() > 0);
}

TEST_CASE("defaults") {
  af_config c;
  af_config_default(&c);
  CHECK(c.dims[0] == 128);
  CHECK(c.dims[2] == 128);
  CHECK(c.n_candidates == 40);
  CHECK(c.perturb_sigma == 0.12);
  CHECK(c.retries == 5);
  CHECK(c.flip_prob == 0.5);
  CHECK(c.rotation_enabled == 1);
  CHECK(c.scale_lo == 0.85);
  CHECK(c.scale_hi == 1.25);
  CHECK(c.shell_thickness == 1);
  CHECK(c.intensity_lo == doctest::Approx(0.3));
  CHECK(c.intensity_hi == 1.0);
  CHECK(c.noise_sigma == 0.02);
  CHECK(c.lambda_anchor < 0);
  CHECK(c.tau_hard < 0);
  CHECK(c.instances == nullptr);
}

TEST_CASE("argument and file errors set last_error") {
  af_bank* bank = nullptr;
  CHECK(af_bank_load(nullptr, &bank) == AF_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(af_last_error()) > 0);
  CHECK(af_bank_load("/nonexistent/bank.bin", &bank) == AF_ERR_IO);
  CHECK(bank == nullptr);
  CHECK(std::string(af_last_error()).find("/nonexistent/bank.bin") != std::string::npos);

  const fs::path junk = fresh_dir("junk") / "bank.bin";
  std::ofstream(junk) << "not a bank";
  CHECK(af_bank_load(junk.string().c_str(), &bank) == AF_ERR_FORMAT);

  af_anchors* anchors = nullptr;
  CHECK(af_anchors_load(junk.string().c_str(), &anchors) == AF_ERR_FORMAT);
  CHECK(af_anchors_fit(corpus().ptrs.data(), 0, kRaw, 4, &anchors) != AF_OK);

  // freeing NULL is a no-op
  af_bank_free(nullptr);
  af_anchors_free(nullptr);
  af_graph_free(nullptr);
  af_generator_free(nullptr);
  af_scene_free(nullptr);
  af_string_free(nullptr);
  af_buffer_free(nullptr);
}

TEST_CASE("last_error is per thread") {
  af_bank* bank = nullptr;
  CHECK(af_bank_load("/nonexistent/a.bin", &bank) == AF_ERR_IO);
  std::string other;
  std::thread t([&] {
    af_graph* g = nullptr;
    af_graph_parse("bogus 1 2\n", 2, &g);
    other = af_last_error();
  });
  t.join();
  CHECK(std::string(af_last_error()).find("a.bin") != std::string::npos);
  CHECK(other.find("bogus") != std::string::npos);
}

TEST_CASE("graph parsing") {
  af_graph* g = nullptr;
  CHECK(af_graph_parse("class 1 a\nclass 2 b\ncontainment a b\ncontainment b a\n", 2, &g) == AF_ERR_CONFIG);
  CHECK(std::string(af_last_error()).find("line 4") != std::string::npos);
  CHECK(g == nullptr);
  REQUIRE(af_graph_parse("class 1 spleen\nexclusion 1 2 0.2\nadjacency 3 4\n", 4, &g) == AF_OK);
  CHECK(af_graph_edge_count(g) == 2);
  CHECK(std::string(af_graph_class_name(g, 1)) == "spleen");
  CHECK(af_graph_class_name(g, 2) == nullptr);
  CHECK(af_graph_class_name(g, 9) == nullptr);
  char* text = nullptr;
  REQUIRE(af_graph_serialize(g, &text) == AF_OK);
  af_graph* back = nullptr;
  CHECK(af_graph_parse(text, 4, &back) == AF_OK);
  CHECK(af_graph_edge_count(back) == 2);
  af_string_free(text);
  af_graph_free(back);
  af_graph_free(g);
  CHECK(af_graph_load("/nonexistent/graph.txt", 4, &g) == AF_ERR_IO);
}

TEST_CASE("bank, anchors, generator and dataset checks") {
  const Corpus& c = corpus();
  const fs::path work = fresh_dir("pipeline");

  af_bank* bank = nullptr;
  const std::uint8_t missing[2] = {1, 200};
  CHECK(af_bank_build(c.ptrs.data(), c.ptrs.size(), missing, 2, 8, &bank) == AF_ERR_DATA);
  CHECK(std::string(af_last_error()).find("200") != std::string::npos);

  REQUIRE(af_bank_build(c.ptrs.data(), c.ptrs.size(), kRaw, 4, 8, &bank) == AF_OK);
  CHECK(af_bank_class_count(bank) == 4);
  CHECK(af_bank_entry_count(bank) >= 4 * 3);
  std::uint8_t raw = 0;
  size_t entries = 0;
  double mean = 0;
  REQUIRE(af_bank_class_info(bank, 4, &raw, &entries, &mean) == AF_OK);
  CHECK(raw == 5);
  CHECK(entries >= 3);
  CHECK(mean > 0);
  CHECK(af_bank_class_info(bank, 5, &raw, &entries, &mean) == AF_ERR_INVALID_ARGUMENT);

  const std::string bank_path = (work / "bank.bin").string();
  REQUIRE(af_bank_save(bank, bank_path.c_str()) == AF_OK);
  const char* names[4] = {"spleen", nullptr, "kidney_left", "liver"};
  REQUIRE(af_bank_write_class_map(bank, (work / "classes.txt").string().c_str(), names) == AF_OK);
  af_bank* loaded = nullptr;
  REQUIRE(af_bank_load(bank_path.c_str(), &loaded) == AF_OK);
  CHECK(af_bank_entry_count(loaded) == af_bank_entry_count(bank));

  af_anchors* anchors = nullptr;
  REQUIRE(af_anchors_fit(c.ptrs.data(), c.ptrs.size(), kRaw, 4, &anchors) == AF_OK);
  CHECK(af_anchors_class_count(anchors) == 4);
  double mu[3], sigma[9];
  size_t n = 0;
  REQUIRE(af_anchors_get(anchors, 1, mu, sigma, &n) == AF_OK);
  CHECK(n == 3);
  for (const double v : mu) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
  CHECK(af_anchors_get(anchors, 1, nullptr, nullptr, nullptr) == AF_OK);
  CHECK(af_anchors_get(anchors, 0, mu, sigma, &n) == AF_ERR_INVALID_ARGUMENT);
  const std::string anchors_path = (work / "anchors.txt").string();
  REQUIRE(af_anchors_save(anchors, anchors_path.c_str()) == AF_OK);
  af_anchors* anchors2 = nullptr;
  REQUIRE(af_anchors_load(anchors_path.c_str(), &anchors2) == AF_OK);
  double mu2[3];
  af_anchors_get(anchors2, 1, mu2, nullptr, nullptr);
  CHECK(mu2[0] == mu[0]);

  af_graph* graph = nullptr;
  REQUIRE(af_graph_parse("class 1 spleen\nclass 2 kidney_right\nclass 3 kidney_left\nclass 4 liver\n"
                         "exclusion kidney_right liver\nexclusion spleen liver\n",
                         4, &graph) == AF_OK);

  af_generator* gen = nullptr;
  af_config bad = small_config();
  bad.dims[0] = 16;
  CHECK(af_generator_create(loaded, anchors2, graph, &bad, &gen) == AF_ERR_CONFIG);
  af_graph* wrong = nullptr;
  REQUIRE(af_graph_parse("", 3, &wrong) == AF_OK);
  af_config cfg = small_config();
  CHECK(af_generator_create(loaded, anchors2, wrong, &cfg, &gen) == AF_ERR_CONFIG);
  af_graph_free(wrong);

  const int instances[4] = {1, 2, 1, 1};
  cfg.instances = instances;
  cfg.n_instances = 4;
  REQUIRE(af_generator_create(loaded, anchors2, graph, &cfg, &gen) == AF_OK);
  // inputs may go away once the generator exists
  af_bank_free(bank);
  af_bank_free(loaded);
  af_anchors_free(anchors);
  af_anchors_free(anchors2);

  af_scene* s0 = nullptr;
  af_scene* s0b = nullptr;
  REQUIRE(af_generator_run(gen, 0, &s0) == AF_OK);
  REQUIRE(af_generator_run(gen, 0, &s0b) == AF_OK);
  int dims[3];
  REQUIRE(af_scene_dims(s0, dims) == AF_OK);
  CHECK(dims[0] == 64);
  const size_t nvox = 64 * 64 * 64;
  CHECK(af_scene_placement_count(s0) + af_scene_skip_count(s0) == 5);

  std::vector<std::uint8_t> labels(nvox), labels_b(nvox);
  CHECK(af_scene_copy_labels(s0, labels.data(), nvox - 1) == AF_ERR_INVALID_ARGUMENT);
  CHECK(af_scene_copy_labels(s0, nullptr, nvox) == AF_ERR_INVALID_ARGUMENT);
  REQUIRE(af_scene_copy_labels(s0, labels.data(), nvox) == AF_OK);
  REQUIRE(af_scene_copy_labels(s0b, labels_b.data(), nvox) == AF_OK);
  CHECK(labels == labels_b);
  std::vector<float> image(nvox);
  CHECK(af_scene_copy_image(s0, image.data(), nvox + 1) == AF_ERR_INVALID_ARGUMENT);
  REQUIRE(af_scene_copy_image(s0, image.data(), nvox) == AF_OK);
  std::size_t labelled = 0;
  for (std::size_t i = 0; i < nvox; ++i) {
    CHECK(labels[i] <= 4);
    labelled += labels[i] != 0;
    CHECK(image[i] >= 0.0f);
    CHECK(image[i] <= 1.0f);
  }
  CHECK(labelled > 0);
  const std::string manifest = af_scene_manifest(s0);
  CHECK(manifest.find("\"placements\"") != std::string::npos);
  CHECK(manifest == af_scene_manifest(s0b));

  const fs::path out = fresh_dir("scenes");
  REQUIRE(af_scene_write(s0, out.string().c_str()) == AF_OK);
  af_scene* s1 = nullptr;
  REQUIRE(af_generator_run(gen, 1, &s1) == AF_OK);
  REQUIRE(af_scene_write(s1, out.string().c_str()) == AF_OK);
  REQUIRE(af_generator_write_index(gen, out.string().c_str(), 2) == AF_OK);
  CHECK(fs::exists(out / "dataset.json"));
  CHECK(fs::exists(out / "lab_000001.nii"));

  int ldims[3];
  std::uint8_t* read_back = nullptr;
  REQUIRE(af_nifti_read_labels((out / "lab_000000.nii").string().c_str(), ldims, &read_back) == AF_OK);
  CHECK(std::memcmp(read_back, labels.data(), nvox) == 0);
  af_buffer_free(read_back);
  CHECK(af_nifti_read_labels((out / "img_000000.nii").string().c_str(), ldims, &read_back) == AF_ERR_DATA);

  char* report = nullptr;
  size_t hard = 99;
  REQUIRE(af_validate_dir(out.string().c_str(), graph, &report, &hard) == AF_OK);
  CHECK(hard == 0);
  CHECK(std::string(report).find("\"hard_violations\": 0") != std::string::npos);
  af_string_free(report);
  CHECK(af_validate_dir(fresh_dir("none").string().c_str(), graph, &report, &hard) == AF_ERR_DATA);

  af_anchors* fitted = nullptr;
  REQUIRE(af_anchors_fit(c.ptrs.data(), c.ptrs.size(), kRaw, 4, &fitted) == AF_OK);
  REQUIRE(af_stats_dir(out.string().c_str(), fitted, &report) == AF_OK);
  CHECK(std::string(report).find("\"classes\"") != std::string::npos);
  af_string_free(report);
  af_anchors_free(fitted);

  // concurrent runs on one generator agree with serial ones
  std::vector<std::uint8_t> par(nvox);
  std::thread t([&] {
    af_scene* s = nullptr;
    if (af_generator_run(gen, 0, &s) == AF_OK) af_scene_copy_labels(s, par.data(), nvox);
    af_scene_free(s);
  });
  af_scene* s1b = nullptr;
  REQUIRE(af_generator_run(gen, 1, &s1b) == AF_OK);
  t.join();
  CHECK(par == labels);

  af_scene_free(s0);
  af_scene_free(s0b);
  af_scene_free(s1);
  af_scene_free(s1b);
  af_generator_free(gen);
  af_graph_free(graph);
}

TEST_CASE("phantom writer") {
  const fs::path dir = fresh_dir("phantoms");
  CHECK(af_phantoms_write(dir.string().c_str(), 0, 1) == AF_ERR_INVALID_ARGUMENT);
  REQUIRE(af_phantoms_write(dir.string().c_str(), 1, 1) == AF_OK);
  CHECK(fs::exists(dir / "phantom_00.nii.gz"));
  std::ifstream f(dir / "classes.txt");
  int rows = 0;
  for (std::string line; std::getline(f, line);)
    if (!line.empty() && line[0] != '#') ++rows;
  CHECK(rows == 32);
  int dims[3];
  std::uint8_t* labels = nullptr;
  REQUIRE(af_nifti_read_labels((dir / "phantom_00.nii.gz").string().c_str(), dims, &labels) == AF_OK);
  CHECK(dims[0] > 0);
  af_buffer_free(labels);
}
