#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "rng.hpp"
#include "shape_bank.hpp"
#include "volume.hpp"

namespace aforge {

// Gaussian over a class's normalized centroid position.
struct AnchorDistribution {
  Label class_id = 0;
  Vec3 mu;
  std::array<double, 9> sigma{};  // row-major, normalized units squared
  std::size_t n_samples = 0;

  friend bool operator==(const AnchorDistribution&, const AnchorDistribution&) = default;
};

inline constexpr double kFallbackSigma = 0.12;
inline constexpr double kCovarianceJitter = 1e-6;
inline constexpr double kAnchorClampLo = 0.02;
inline constexpr double kAnchorClampHi = 0.98;

class AnchorModel {
 public:
  AnchorModel() = default;
  explicit AnchorModel(std::vector<AnchorDistribution> table);

  int class_count() const { return static_cast<int>(table_.size()); }
  const AnchorDistribution& at(Label class_id) const;
  const std::vector<AnchorDistribution>& table() const { return table_; }

  friend bool operator==(const AnchorModel&, const AnchorModel&) = default;

 private:
  std::vector<AnchorDistribution> table_;  // index class_id - 1
};

// Normalized centroid of every raw label present in `grid` (index = raw label).
std::array<std::optional<Vec3>, 256> class_centroids(const LabelGrid& grid);

// Mean and unbiased covariance of the per-source whole-class centroids.
// Fewer than two observations fall back to kFallbackSigma^2 * I.
AnchorModel fit_anchors(std::span<const LabeledSource> sources, const ClassMap& class_map);

// Draw from N(mu, sigma + jitter*I) using the symmetric square root of the
// covariance, clamped per axis to [kAnchorClampLo, kAnchorClampHi].
Vec3 sample_anchor(const AnchorModel& model, Label class_id, Rng& rng);

// Plaintext table, one row per class:
//   class_id mu_x mu_y mu_z s00 s01 s02 s10 s11 s12 s20 s21 s22 n_samples
std::string format_anchor_table(const AnchorModel& model);
AnchorModel parse_anchor_table(const std::string& text);
void save_anchors(const AnchorModel& model, const std::string& path);
AnchorModel load_anchors(const std::string& path);

}  // namespace aforge
