#include <doctest.h>

#include <map>
#include <set>

#include "oracles.hpp"
#include "shape_bank.hpp"

using namespace aforge;

namespace {

void paint_box(LabelGrid& g, Index3 lo, Index3 size, Label v) {
  for (int z = 0; z < size.z; ++z)
    for (int y = 0; y < size.y; ++y)
      for (int x = 0; x < size.x; ++x) g.at(lo.x + x, lo.y + y, lo.z + z) = v;
}

ShapeEntry entry_of(BinaryMask tight) {
  return {1, 1, "s", crop_to_content(tight, 1)};
}

BinaryMask solid(Dims d) {
  BinaryMask m(d);
  for (std::size_t i = 0; i < d.count(); ++i) m.set_flat(i);
  return m;
}

}  // namespace

TEST_CASE("bank from a single cube") {
  LabelGrid g({10, 10, 10});
  paint_box(g, {2, 3, 4}, {3, 3, 3}, 7);
  const std::vector<LabeledSource> sources{{"one", g}};
  const std::vector<Label> classes{7};
  const ShapeBank bank = build_bank(sources, classes);
  CHECK(bank.class_count() == 1);
  CHECK(bank.class_map().raw_of(1) == 7);
  CHECK(bank.class_map().id_of(7) == Label{1});
  REQUIRE(bank.entries().size() == 1);
  const ShapeEntry& e = bank.entries()[0];
  CHECK(e.class_id == 1);
  CHECK(e.raw_class == 7);
  CHECK(e.source_id == "one");
  CHECK(e.mask.dims() == Dims{5, 5, 5});
  CHECK(e.mask.count() == 27);
  CHECK(boundary_voxels(e.mask).count() == 26);
}

TEST_CASE("margin is padded even at the source border") {
  LabelGrid g({6, 6, 6});
  paint_box(g, {0, 0, 0}, {2, 2, 2}, 3);
  const std::vector<LabeledSource> sources{{"edge", g}};
  const std::vector<Label> classes{3};
  const ShapeBank bank = build_bank(sources, classes);
  REQUIRE(bank.entries().size() == 1);
  CHECK(bank.entries()[0].mask.dims() == Dims{4, 4, 4});
  CHECK(bank.entries()[0].mask.get(1, 1, 1));
  CHECK_FALSE(bank.entries()[0].mask.get(0, 0, 0));
}

TEST_CASE("small components are filtered") {
  LabelGrid g({16, 16, 16});
  paint_box(g, {1, 1, 1}, {5, 5, 4}, 9);    // 100 voxels
  paint_box(g, {12, 12, 12}, {3, 1, 1}, 9);  // 3 voxels
  const std::vector<LabeledSource> sources{{"s", g}};
  const std::vector<Label> classes{9};
  REQUIRE(oracle::flood_components(g, 9).size() == 2);
  const ShapeBank bank = build_bank(sources, classes, 10);
  REQUIRE(bank.entries().size() == 1);
  CHECK(bank.entries()[0].mask.count() == 100);
  CHECK(build_bank(sources, classes, 3).entries().size() == 2);
  CHECK_THROWS_AS(build_bank(sources, classes, 101), Error);
}

TEST_CASE("missing classes are listed") {
  LabelGrid g({8, 8, 8});
  paint_box(g, {1, 1, 1}, {3, 3, 3}, 1);
  const std::vector<LabeledSource> sources{{"s", g}};
  const std::vector<Label> classes{1, 5, 6};
  try {
    build_bank(sources, classes);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kData);
    CHECK(std::string(e.what()).find("5 6") != std::string::npos);
  }
}

TEST_CASE("class map is a bijection in ascending raw order") {
  const ClassMap map({57, 3, 42, 10});
  CHECK(map.size() == 4);
  CHECK(map.raw_of(1) == 3);
  CHECK(map.raw_of(4) == 57);
  for (const Label raw : {3, 10, 42, 57}) CHECK(map.raw_of(*map.id_of(raw)) == raw);
  for (Label id = 1; id <= 4; ++id) CHECK(*map.id_of(map.raw_of(id)) == id);
  CHECK_FALSE(map.id_of(11));
  CHECK_THROWS_AS(ClassMap({4, 4}), Error);
  CHECK_THROWS_AS(ClassMap({0, 1}), Error);
}

TEST_CASE("identity augmentation returns the entry mask") {
  std::mt19937_64 seedgen(2);
  for (int t = 0; t < 10; ++t) {
    const ShapeEntry e = entry_of(oracle::random_blob({9, 8, 7}, 50, seedgen));
    Rng rng = make_stream(1, static_cast<std::uint64_t>(t));
    CHECK(augment(e, AugmentParams::identity(), rng) == e.mask);
  }
}

TEST_CASE("nearest-neighbour upscale of a 2^3 cube") {
  const BinaryMask up = rescale(solid({2, 2, 2}), 2.0);
  CHECK(up.dims() == Dims{4, 4, 4});
  CHECK(up.count() == 64);
  const ShapeEntry e = entry_of(solid({2, 2, 2}));
  Rng rng = make_stream(0, 0);
  const BinaryMask a = augment(e, {0.0, false, 2.0, 2.0}, rng);
  CHECK(a.count() == 64);
  CHECK(a.dims() == Dims{6, 6, 6});
}

TEST_CASE("rescale that would empty the mask is skipped") {
  BinaryMask m({3, 3, 3});
  m.set(1, 1, 1);
  const ShapeEntry e{1, 1, "s", m};
  Rng rng = make_stream(0, 0);
  const BinaryMask a = augment(e, {0.0, false, 0.1, 0.1}, rng);
  CHECK(a.count() == 1);
}

TEST_CASE("flips and rotations preserve voxel count") {
  CHECK(axis_rotations().size() == 24);
  std::set<std::vector<std::uint8_t>> distinct;
  BinaryMask asym({4, 3, 2});
  asym.set(0, 0, 0);
  asym.set(1, 0, 0);
  asym.set(3, 0, 0);
  asym.set(0, 2, 0);
  asym.set(0, 0, 1);
  for (const auto& r : axis_rotations()) {
    const BinaryMask rot = rotate(asym, r);
    CHECK(rot.count() == asym.count());
    std::vector<std::uint8_t> key(rot.bits().begin(), rot.bits().end());
    key.push_back(static_cast<std::uint8_t>(rot.dims().x));
    key.push_back(static_cast<std::uint8_t>(rot.dims().y));
    distinct.insert(key);
  }
  CHECK(distinct.size() == 24);
  for (int axis = 0; axis < 3; ++axis) {
    CHECK(flip(asym, axis).count() == asym.count());
    CHECK(flip(flip(asym, axis), axis) == asym);
  }
  std::mt19937_64 seedgen(9);
  for (int t = 0; t < 20; ++t) {
    const ShapeEntry e = entry_of(oracle::random_blob({10, 10, 10}, 80, seedgen));
    Rng rng = make_stream(4, static_cast<std::uint64_t>(t));
    CHECK(augment(e, {0.5, true, 1.0, 1.0}, rng).count() == e.mask.count());
  }
}

TEST_CASE("scaled voxel count follows the cube of the factor") {
  for (const int side : {8, 11, 16}) {
    const ShapeEntry e = entry_of(solid({side, side, side}));
    const double n = static_cast<double>(side * side * side);
    for (int t = 0; t < 20; ++t) {
      Rng rng = make_stream(8, static_cast<std::uint64_t>(t));
      const double f = 0.85 + 0.02 * t;
      const BinaryMask a = augment(e, {0.5, true, f, f}, rng);
      const double ratio = static_cast<double>(a.count()) / n;
      CHECK(ratio >= 0.7 * f * f * f);
      CHECK(ratio <= 1.3 * f * f * f);
    }
  }
}

TEST_CASE("augmentation is deterministic and keeps a one-voxel margin") {
  std::mt19937_64 seedgen(4);
  const ShapeEntry e = entry_of(oracle::random_blob({12, 12, 12}, 150, seedgen));
  Rng a = make_stream(77, 3);
  Rng b = make_stream(77, 3);
  const AugmentParams p;
  for (int i = 0; i < 10; ++i) {
    const BinaryMask x = augment(e, p, a);
    CHECK(x == augment(e, p, b));
    const auto box = bounding_box(x);
    REQUIRE(box);
    CHECK(box->min == Index3{1, 1, 1});
    CHECK(box->max == Index3{x.dims().x - 2, x.dims().y - 2, x.dims().z - 2});
  }
}

TEST_CASE("sample_shape picks entries uniformly") {
  std::vector<ShapeEntry> entries;
  for (int i = 1; i <= 3; ++i) entries.push_back({1, 5, "s", entry_of(solid({i, 1, 1})).mask});
  const ShapeBank bank(ClassMap({5}), entries);
  Rng rng = make_stream(123, 0);
  std::map<std::size_t, int> hits;
  for (int i = 0; i < 3000; ++i) ++hits[sample_shape(bank, 1, AugmentParams::identity(), rng).count()];
  REQUIRE(hits.size() == 3);
  for (const auto& [size, n] : hits) {
    CHECK(n >= 850);
    CHECK(n <= 1150);
  }
  CHECK_THROWS_AS(sample_shape(bank, 2, AugmentParams::identity(), rng), Error);

  Rng r1 = make_stream(5, 5), r2 = make_stream(5, 5);
  for (int i = 0; i < 20; ++i)
    CHECK(sample_shape(bank, 1, AugmentParams{}, r1) == sample_shape(bank, 1, AugmentParams{}, r2));
}

TEST_CASE("bank serialization round-trips") {
  std::mt19937_64 rng(6);
  LabelGrid a({20, 20, 20}), b({18, 22, 16});
  for (Label v = 1; v <= 4; ++v) {
    for (LabelGrid* g : {&a, &b}) {
      const BinaryMask blob = oracle::random_blob(g->dims(), 40 * v, rng);
      for (std::size_t i = 0; i < g->size(); ++i)
        if (blob.test(i)) (*g)[i] = static_cast<Label>(v * 10);
    }
  }
  const std::vector<LabeledSource> sources{{"subject_a", a}, {"b", b}};
  const std::vector<Label> classes{10, 20, 30, 40};
  const ShapeBank bank = build_bank(sources, classes);
  const auto bytes = encode_bank(bank);
  const ShapeBank back = decode_bank(bytes);
  CHECK(back == bank);
  CHECK(encode_bank(back) == bytes);

  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(decode_bank(truncated), Error);
  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(decode_bank(bad), Error);
  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS(decode_bank(trailing), Error);
}

TEST_CASE("class map sidecar") {
  LabelGrid g({8, 8, 8});
  paint_box(g, {1, 1, 1}, {2, 2, 2}, 4);
  paint_box(g, {5, 5, 5}, {2, 2, 2}, 2);
  const std::vector<LabeledSource> sources{{"s", g}};
  const std::vector<Label> classes{4, 2};
  const ShapeBank bank = build_bank(sources, classes);
  const std::vector<std::string> names{"kidney", ""};
  CHECK(format_class_map(bank, names) == "# raw_label class_id name entries\n2 1 kidney 1\n4 2 - 1\n");
}
