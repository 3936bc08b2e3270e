#pragma once

// Procedural label-only "subjects" with 32 abdominal/thoracic structures laid
// out roughly like a torso. They stand in for real segmentation corpora in
// tests, demos and benchmarks; raw labels follow the TotalSegmentator v1
// numbering for the same structures.

#include <cstdint>
#include <span>
#include <vector>

#include "shape_bank.hpp"

namespace aforge {

enum class PhantomShape { kEllipsoid, kTube, kBox, kShell, kRing };

struct PhantomOrgan {
  Label raw;
  const char* name;
  PhantomShape shape;
  Vec3 center;  // normalized
  Vec3 radii;   // normalized half-extents; kTube uses x as radius and z as half-length
};

std::span<const PhantomOrgan> phantom_organs();

// One subject: every organ jittered in position and size, painted largest
// first so small structures stay visible.
LabelGrid make_phantom_subject(const Dims& dims, Rng& rng);

// `subjects` volumes of slightly different sizes around 96^3.
std::vector<LabeledSource> make_phantom_corpus(int subjects, std::uint64_t seed);

}  // namespace aforge
