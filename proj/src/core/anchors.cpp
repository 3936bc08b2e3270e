#include "anchors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <sstream>

#include "byteio.hpp"
#include "text.hpp"

namespace aforge {

AnchorModel::AnchorModel(std::vector<AnchorDistribution> table) : table_(std::move(table)) {
  for (std::size_t i = 0; i < table_.size(); ++i)
    if (table_[i].class_id != i + 1)
      throw Error(ErrorCode::kFormat, "anchor table must list classes 1..C in order");
}

const AnchorDistribution& AnchorModel::at(Label class_id) const {
  if (class_id < 1 || class_id > table_.size())
    throw Error(ErrorCode::kInvalidArgument, "no anchor for class " + std::to_string(class_id));
  return table_[class_id - 1];
}

std::array<std::optional<Vec3>, 256> class_centroids(const LabelGrid& grid) {
  std::array<std::array<double, 3>, 256> sums{};
  std::array<std::size_t, 256> counts{};
  const Dims d = grid.dims();
  std::size_t flat = 0;
  for (int k = 0; k < d.z; ++k)
    for (int j = 0; j < d.y; ++j)
      for (int i = 0; i < d.x; ++i, ++flat) {
        const Label v = grid[flat];
        if (v == 0) continue;
        sums[v][0] += i;
        sums[v][1] += j;
        sums[v][2] += k;
        ++counts[v];
      }
  std::array<std::optional<Vec3>, 256> out;
  for (int v = 1; v < 256; ++v) {
    if (counts[v] == 0) continue;
    const double n = static_cast<double>(counts[v]);
    out[v] = normalize({sums[v][0] / n, sums[v][1] / n, sums[v][2] / n}, d);
  }
  return out;
}

AnchorModel fit_anchors(std::span<const LabeledSource> sources, const ClassMap& class_map) {
  std::vector<std::vector<Vec3>> samples(static_cast<std::size_t>(class_map.size()));
  for (const auto& src : sources) {
    const auto centroids = class_centroids(src.labels);
    for (Label id = 1; id <= class_map.size(); ++id)
      if (const auto& c = centroids[class_map.raw_of(id)]) samples[id - 1].push_back(*c);
  }

  std::vector<AnchorDistribution> table;
  std::string missing;
  for (Label id = 1; id <= class_map.size(); ++id) {
    const auto& s = samples[id - 1];
    if (s.empty()) {
      missing += ' ' + std::to_string(class_map.raw_of(id));
      continue;
    }
    AnchorDistribution a;
    a.class_id = id;
    a.n_samples = s.size();
    const double n = static_cast<double>(s.size());
    for (const Vec3& p : s)
      for (int ax = 0; ax < 3; ++ax) a.mu[ax] += p[ax] / n;
    if (s.size() < 2) {
      for (int ax = 0; ax < 3; ++ax) a.sigma[4 * ax] = kFallbackSigma * kFallbackSigma;
    } else {
      for (const Vec3& p : s)
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c) a.sigma[3 * r + c] += (p[r] - a.mu[r]) * (p[c] - a.mu[c]) / (n - 1.0);
    }
    table.push_back(a);
  }
  if (!missing.empty()) throw Error(ErrorCode::kData, "fit_anchors: classes absent from all sources:" + missing);
  return AnchorModel(std::move(table));
}

Vec3 sample_anchor(const AnchorModel& model, Label class_id, Rng& rng) {
  const AnchorDistribution& a = model.at(class_id);
  Eigen::Matrix3d cov;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) cov(r, c) = a.sigma[3 * r + c];
  cov = 0.5 * (cov + cov.transpose()).eval();
  cov += kCovarianceJitter * Eigen::Matrix3d::Identity();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const Eigen::Vector3d root_vals = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::Matrix3d root = eig.eigenvectors() * root_vals.asDiagonal() * eig.eigenvectors().transpose();

  Eigen::Vector3d z;
  for (int ax = 0; ax < 3; ++ax) z[ax] = standard_normal(rng);
  const Eigen::Vector3d x = root * z;
  Vec3 out;
  for (int ax = 0; ax < 3; ++ax) out[ax] = std::clamp(a.mu[ax] + x[ax], kAnchorClampLo, kAnchorClampHi);
  return out;
}

std::string format_anchor_table(const AnchorModel& model) {
  std::ostringstream out;
  out << "# class_id mu_x mu_y mu_z s00 s01 s02 s10 s11 s12 s20 s21 s22 n_samples\n";
  for (const auto& a : model.table()) {
    out << static_cast<int>(a.class_id);
    for (int ax = 0; ax < 3; ++ax) out << ' ' << format_double(a.mu[ax]);
    for (const double s : a.sigma) out << ' ' << format_double(s);
    out << ' ' << a.n_samples << '\n';
  }
  return out.str();
}

AnchorModel parse_anchor_table(const std::string& text) {
  std::vector<AnchorDistribution> table;
  int line_no = 0;
  for (const auto& line : split_lines(text)) {
    ++line_no;
    const auto tok = tokenize(line);
    if (tok.empty()) continue;
    const std::string where = "anchor table line " + std::to_string(line_no) + ": ";
    if (tok.size() != 14) throw Error(ErrorCode::kFormat, where + "expected 14 fields");
    AnchorDistribution a;
    const long id = parse_integer(tok[0], where + "class id");
    if (id < 1 || id > 255) throw Error(ErrorCode::kFormat, where + "class id out of range");
    a.class_id = static_cast<Label>(id);
    for (int ax = 0; ax < 3; ++ax) a.mu[ax] = parse_real(tok[1 + ax], where + "mu");
    for (int i = 0; i < 9; ++i) a.sigma[i] = parse_real(tok[4 + i], where + "sigma");
    const long n = parse_integer(tok[13], where + "n_samples");
    if (n < 0) throw Error(ErrorCode::kFormat, where + "negative sample count");
    a.n_samples = static_cast<std::size_t>(n);
    for (int ax = 0; ax < 3; ++ax)
      if (!(a.mu[ax] >= 0.0 && a.mu[ax] <= 1.0)) throw Error(ErrorCode::kFormat, where + "mu outside [0,1]");
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < r; ++c)
        if (a.sigma[3 * r + c] != a.sigma[3 * c + r]) throw Error(ErrorCode::kFormat, where + "sigma not symmetric");
    table.push_back(a);
  }
  if (table.empty()) throw Error(ErrorCode::kFormat, "anchor table is empty");
  return AnchorModel(std::move(table));
}

void save_anchors(const AnchorModel& model, const std::string& path) {
  write_text_file(path, format_anchor_table(model));
}

AnchorModel load_anchors(const std::string& path) { return parse_anchor_table(read_text_file(path)); }

}  // namespace aforge
