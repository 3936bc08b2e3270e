#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "volume.hpp"

using namespace aforge;

namespace {

BinaryMask cube(Dims d, Index3 lo, int side) {
  BinaryMask m(d);
  for (int z = 0; z < side; ++z)
    for (int y = 0; y < side; ++y)
      for (int x = 0; x < side; ++x) m.set(lo + Index3{x, y, z});
  return m;
}

oracle::VoxelSet component_set(const Component& c, const Dims& grid) {
  oracle::VoxelSet s;
  const Dims d = c.mask.dims();
  for (int z = 0; z < d.z; ++z)
    for (int y = 0; y < d.y; ++y)
      for (int x = 0; x < d.x; ++x)
        if (c.mask.get(x, y, z)) s.insert(grid.index(c.origin + Index3{x, y, z}));
  return s;
}

}  // namespace

TEST_CASE("flat index is x fastest") {
  const Dims d{4, 5, 6};
  CHECK(d.index(1, 0, 0) == 1);
  CHECK(d.index(0, 1, 0) == 4);
  CHECK(d.index(0, 0, 1) == 20);
  for (std::size_t f = 0; f < d.count(); f += 7) CHECK(d.index(d.coords(f)) == f);
}

TEST_CASE("connected components: solid cube") {
  LabelGrid g({8, 8, 8});
  for (int z = 2; z < 5; ++z)
    for (int y = 2; y < 5; ++y)
      for (int x = 2; x < 5; ++x) g.at(x, y, z) = 4;
  const auto comps = connected_components(g, 4);
  REQUIRE(comps.size() == 1);
  CHECK(comps[0].voxels == 27);
  CHECK(comps[0].mask.count() == 27);
  CHECK(comps[0].origin == Index3{2, 2, 2});
  CHECK(connected_components(g, 9).empty());
}

TEST_CASE("connected components: separated voxels and diagonal contact") {
  LabelGrid g({8, 8, 8});
  g.at(1, 1, 1) = 2;
  g.at(4, 1, 1) = 2;  // two-voxel gap
  auto comps = connected_components(g, 2);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].voxels == 1);
  CHECK(comps[1].voxels == 1);
  CHECK(comps[0].origin == Index3{1, 1, 1});  // equal sizes keep scan order

  g.at(5, 2, 2) = 2;  // corner-touches (4,1,1)
  comps = connected_components(g, 2);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].voxels == 2);
}

TEST_CASE("connected components match flood-fill oracle on random 16^3 grids") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const Dims d{16, 16, 16};
    LabelGrid g(d);
    for (int b = 0; b < 3; ++b) {
      const BinaryMask blob = oracle::random_blob(d, 20 + 40 * b, rng);
      for (std::size_t i = 0; i < d.count(); ++i)
        if (blob.test(i)) g[i] = 3;
    }
    std::bernoulli_distribution speck(0.01);
    for (std::size_t i = 0; i < d.count(); ++i)
      if (speck(rng)) g[i] = 3;
    const auto expected = oracle::flood_components(g, 3);
    const auto got = connected_components(g, 3);
    REQUIRE(got.size() == expected.size());
    for (std::size_t c = 0; c < got.size(); ++c) {
      CHECK(got[c].voxels == expected[c].size());
      CHECK(component_set(got[c], d) == expected[c]);
    }
  }
}

TEST_CASE("iou") {
  const Dims d{6, 6, 6};
  const BinaryMask a = cube(d, {1, 1, 1}, 2);
  const BinaryMask b = cube(d, {2, 1, 1}, 2);
  CHECK(iou(a, a) == 1.0);
  CHECK(iou(a, b) == doctest::Approx(4.0 / 12.0));
  CHECK(iou(a, b) == iou(b, a));
  CHECK(iou(a, cube(d, {4, 4, 4}, 2)) == 0.0);
  CHECK_THROWS_AS(iou(a, BinaryMask({5, 6, 6})), Error);
  CHECK_THROWS_AS(iou(BinaryMask(d), BinaryMask(d)), Error);
  CHECK(iou(a, BinaryMask(d)) == 0.0);
}

TEST_CASE("boundary voxels") {
  const BinaryMask one = cube({1, 1, 1}, {0, 0, 0}, 1);
  CHECK(boundary_voxels(one) == one);

  const BinaryMask c3 = cube({5, 5, 5}, {1, 1, 1}, 3);
  const BinaryMask rim = boundary_voxels(c3);
  CHECK(rim.count() == 26);
  CHECK_FALSE(rim.get(2, 2, 2));
  CHECK(boundary_voxels(rim) == rim);

  // grid border counts as outside
  const BinaryMask full = cube({3, 3, 3}, {0, 0, 0}, 3);
  CHECK(boundary_voxels(full).count() == 26);
}

TEST_CASE("shell thickness") {
  const BinaryMask c5 = cube({7, 7, 7}, {1, 1, 1}, 5);
  CHECK(shell(c5, 1).count() == 98);
  CHECK(shell(c5, 2).count() == 124);
  CHECK(shell(c5, 3) == c5);
  CHECK(shell(cube({9, 9, 9}, {1, 1, 1}, 7), 2).count() == 343 - 27);
  CHECK_THROWS_AS(shell(c5, 0), Error);
}

TEST_CASE("shell matches distance oracle") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Dims d{12, 12, 12};
    const BinaryMask m = oracle::random_blob(d, 400, rng);
    for (int t = 1; t <= 3; ++t) CHECK(oracle::to_set(shell(m, t)) == oracle::set_shell(oracle::to_set(m), d, t));
  }
}

TEST_CASE("overlay") {
  LabelGrid g({6, 6, 6});
  const BinaryMask m = cube({2, 2, 2}, {0, 0, 0}, 2);
  CHECK(overlay(g, m, {1, 1, 1}, 2) == 8);
  CHECK(overlay(g, m, {1, 1, 1}, 5) == 8);
  CHECK(g.at(1, 1, 1) == 5);
  CHECK(g.at(2, 2, 2) == 5);

  const LabelGrid before = g;
  overlay(g, m, {1, 1, 1}, 5);
  CHECK(g == before);

  // partial clip: the oracle counts in-bounds voxels directly
  LabelGrid h({6, 6, 6});
  const BinaryMask big = cube({4, 4, 4}, {0, 0, 0}, 4);
  for (const Index3 off : {Index3{4, 4, 4}, Index3{-2, 0, 3}, Index3{-3, -3, -3}, Index3{5, 5, 5}}) {
    const std::size_t expected = oracle::placed(big, off, h.dims()).size();
    CHECK(overlay(h, big, off, 1) == expected);
  }
  CHECK(overlay(h, big, {10, 0, 0}, 1) == 0);
}

TEST_CASE("crop keeps a full margin") {
  BinaryMask m({4, 4, 4});
  m.set(0, 0, 0);
  m.set(1, 0, 0);
  Index3 origin;
  const BinaryMask c = crop_to_content(m, 1, &origin);
  CHECK(c.dims() == Dims{4, 3, 3});
  CHECK(origin == Index3{-1, -1, -1});
  CHECK(c.get(1, 1, 1));
  CHECK(c.get(2, 1, 1));
  CHECK(c.count() == 2);
}

TEST_CASE("centroid and normalization") {
  BinaryMask m({9, 9, 9});
  m.set(4, 4, 4);
  const auto c = centroid(m);
  REQUIRE(c);
  const Vec3 n = normalize(*c, m.dims());
  CHECK(n == Vec3{0.5, 0.5, 0.5});
  CHECK(denormalize(n, m.dims()) == *c);
  CHECK(normalize({0, 3, 0}, {1, 7, 1}) == Vec3{0.5, 0.5, 0.5});
  CHECK_FALSE(centroid(BinaryMask({3, 3, 3})));
}

TEST_CASE("iou properties on random masks") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Dims d{10, 9, 8};
    const BinaryMask a = oracle::random_blob(d, 60, rng);
    const BinaryMask b = oracle::random_blob(d, 90, rng);
    const double v = iou(a, b);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(v == iou(b, a));
    CHECK(v == oracle::set_iou(oracle::to_set(a), oracle::to_set(b)));
  }
}
