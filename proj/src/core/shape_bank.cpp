#include "shape_bank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "byteio.hpp"

namespace aforge {

ClassMap::ClassMap(std::vector<Label> raw_labels) : raw_by_id_(std::move(raw_labels)) {
  std::sort(raw_by_id_.begin(), raw_by_id_.end());
  if (std::adjacent_find(raw_by_id_.begin(), raw_by_id_.end()) != raw_by_id_.end())
    throw Error(ErrorCode::kInvalidArgument, "class map: duplicate raw label");
  if (std::find(raw_by_id_.begin(), raw_by_id_.end(), Label{0}) != raw_by_id_.end())
    throw Error(ErrorCode::kInvalidArgument, "class map: raw label 0 is background");
  if (raw_by_id_.size() > 255) throw Error(ErrorCode::kInvalidArgument, "class map: more than 255 classes");
}

Label ClassMap::raw_of(Label id) const {
  if (id < 1 || id > raw_by_id_.size())
    throw Error(ErrorCode::kInvalidArgument, "unknown class id " + std::to_string(id));
  return raw_by_id_[id - 1];
}

std::optional<Label> ClassMap::id_of(Label raw) const {
  const auto it = std::lower_bound(raw_by_id_.begin(), raw_by_id_.end(), raw);
  if (it == raw_by_id_.end() || *it != raw) return std::nullopt;
  return static_cast<Label>(it - raw_by_id_.begin() + 1);
}

void AugmentParams::validate() const {
  if (!(flip_prob >= 0.0 && flip_prob <= 1.0))
    throw Error(ErrorCode::kConfig, "flip probability must lie in [0,1]");
  if (!(scale_lo > 0.0 && scale_lo <= scale_hi))
    throw Error(ErrorCode::kConfig, "scale range must satisfy 0 < lo <= hi");
}

ShapeBank::ShapeBank(ClassMap class_map, std::vector<ShapeEntry> entries)
    : class_map_(std::move(class_map)), entries_(std::move(entries)) {
  by_class_.resize(static_cast<std::size_t>(class_map_.size()));
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const Label id = entries_[i].class_id;
    if (id < 1 || id > class_map_.size())
      throw Error(ErrorCode::kFormat, "bank entry has class id outside 1..C");
    if (entries_[i].mask.empty()) throw Error(ErrorCode::kFormat, "bank entry has an empty mask");
    by_class_[id - 1].push_back(i);
  }
}

const std::vector<std::size_t>& ShapeBank::entries_of(Label class_id) const {
  if (class_id < 1 || class_id > by_class_.size())
    throw Error(ErrorCode::kInvalidArgument, "unknown class id " + std::to_string(class_id));
  return by_class_[class_id - 1];
}

double ShapeBank::mean_voxels(Label class_id) const {
  const auto& idx = entries_of(class_id);
  if (idx.empty()) return 0.0;
  double total = 0.0;
  for (const std::size_t i : idx) total += static_cast<double>(entries_[i].mask.count());
  return total / static_cast<double>(idx.size());
}

ShapeBank build_bank(std::span<const LabeledSource> sources, std::span<const Label> selected_raw_classes,
                     std::size_t min_component) {
  if (sources.empty()) throw Error(ErrorCode::kInvalidArgument, "build_bank: no source volumes");
  if (selected_raw_classes.empty()) throw Error(ErrorCode::kInvalidArgument, "build_bank: no classes selected");

  const std::set<Label> unique(selected_raw_classes.begin(), selected_raw_classes.end());
  ClassMap class_map(std::vector<Label>(unique.begin(), unique.end()));

  std::vector<bool> present(256, false);
  for (const auto& src : sources)
    for (const Label v : src.labels.values()) present[v] = true;
  std::vector<Label> missing;
  for (const Label raw : unique)
    if (!present[raw]) missing.push_back(raw);
  if (!missing.empty()) {
    std::ostringstream msg;
    msg << "classes absent from all sources:";
    for (const Label m : missing) msg << ' ' << static_cast<int>(m);
    throw Error(ErrorCode::kData, msg.str());
  }

  std::vector<ShapeEntry> entries;
  for (const auto& src : sources) {
    for (const Label raw : unique) {
      for (auto& comp : connected_components(src.labels, raw)) {
        if (comp.voxels < min_component) continue;
        const BBox3 whole{{0, 0, 0}, {comp.mask.dims().x - 1, comp.mask.dims().y - 1, comp.mask.dims().z - 1}};
        entries.push_back({*class_map.id_of(raw), raw, src.id, crop(comp.mask, whole, kCropMargin)});
      }
    }
  }

  std::vector<bool> has_entry(static_cast<std::size_t>(class_map.size()) + 1, false);
  for (const auto& e : entries) has_entry[e.class_id] = true;
  std::ostringstream too_small;
  bool any_small = false;
  for (Label id = 1; id <= class_map.size(); ++id)
    if (!has_entry[id]) {
      too_small << ' ' << static_cast<int>(class_map.raw_of(id));
      any_small = true;
    }
  if (any_small)
    throw Error(ErrorCode::kData, "classes with no component of at least " + std::to_string(min_component) +
                                      " voxels:" + too_small.str());

  return ShapeBank(std::move(class_map), std::move(entries));
}

const std::vector<AxisRotation>& axis_rotations() {
  static const std::vector<AxisRotation> rotations = [] {
    std::vector<AxisRotation> out;
    int perm[3] = {0, 1, 2};
    do {
      // Parity of the permutation: count inversions.
      int inversions = 0;
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
          if (perm[i] > perm[j]) ++inversions;
      const int parity = inversions % 2 == 0 ? 1 : -1;
      for (int signs = 0; signs < 8; ++signs) {
        AxisRotation r{};
        int det = parity;
        for (int a = 0; a < 3; ++a) {
          r.perm[a] = perm[a];
          r.sign[a] = (signs >> a) & 1 ? -1 : 1;
          det *= r.sign[a];
        }
        if (det == 1) out.push_back(r);
      }
    } while (std::next_permutation(perm, perm + 3));
    return out;
  }();
  return rotations;
}

BinaryMask flip(const BinaryMask& m, int axis) {
  const Dims d = m.dims();
  BinaryMask out(d);
  for (int k = 0; k < d.z; ++k)
    for (int j = 0; j < d.y; ++j)
      for (int i = 0; i < d.x; ++i) {
        if (!m.get(i, j, k)) continue;
        Index3 p{i, j, k};
        if (axis == 0) p.x = d.x - 1 - i;
        if (axis == 1) p.y = d.y - 1 - j;
        if (axis == 2) p.z = d.z - 1 - k;
        out.set(p);
      }
  return out;
}

BinaryMask rotate(const BinaryMask& m, const AxisRotation& r) {
  const Dims d = m.dims();
  const Dims od{d[r.perm[0]], d[r.perm[1]], d[r.perm[2]]};
  BinaryMask out(od);
  for (int k = 0; k < d.z; ++k)
    for (int j = 0; j < d.y; ++j)
      for (int i = 0; i < d.x; ++i) {
        if (!m.get(i, j, k)) continue;
        const int in[3] = {i, j, k};
        int o[3];
        for (int a = 0; a < 3; ++a) {
          const int v = in[r.perm[a]];
          o[a] = r.sign[a] > 0 ? v : od[a] - 1 - v;
        }
        out.set(o[0], o[1], o[2]);
      }
  return out;
}

BinaryMask rescale(const BinaryMask& m, double factor) {
  const Dims d = m.dims();
  Dims od;
  for (int a = 0; a < 3; ++a) {
    const int e = std::max(1, static_cast<int>(std::lround(d[a] * factor)));
    (a == 0 ? od.x : a == 1 ? od.y : od.z) = e;
  }
  // Map each output voxel centre back into the source extent.
  auto source_index = [](int i, int in_extent, int out_extent) {
    const double s = (i + 0.5) * static_cast<double>(in_extent) / static_cast<double>(out_extent);
    return std::min(in_extent - 1, static_cast<int>(std::floor(s)));
  };
  std::vector<int> sx(od.x), sy(od.y), sz(od.z);
  for (int i = 0; i < od.x; ++i) sx[i] = source_index(i, d.x, od.x);
  for (int j = 0; j < od.y; ++j) sy[j] = source_index(j, d.y, od.y);
  for (int k = 0; k < od.z; ++k) sz[k] = source_index(k, d.z, od.z);
  BinaryMask out(od);
  for (int k = 0; k < od.z; ++k)
    for (int j = 0; j < od.y; ++j)
      for (int i = 0; i < od.x; ++i)
        if (m.get(sx[i], sy[j], sz[k])) out.set(i, j, k);
  return out;
}

BinaryMask augment(const ShapeEntry& entry, const AugmentParams& params, Rng& rng) {
  BinaryMask m = crop_to_content(entry.mask, 0);
  for (int axis = 0; axis < 3; ++axis)
    if (uniform01(rng) < params.flip_prob) m = flip(m, axis);
  if (params.rotation_enabled) {
    const auto& rots = axis_rotations();
    std::uniform_int_distribution<std::size_t> pick(0, rots.size() - 1);
    m = rotate(m, rots[pick(rng)]);
  }
  const double u = uniform01(rng);
  const double factor = params.scale_lo + (params.scale_hi - params.scale_lo) * u;
  if (factor != 1.0) {
    BinaryMask scaled = rescale(m, factor);
    if (!scaled.empty()) m = std::move(scaled);
  }
  return crop_to_content(m, kCropMargin);
}

BinaryMask sample_shape(const ShapeBank& bank, Label class_id, const AugmentParams& params, Rng& rng) {
  const auto& idx = bank.entries_of(class_id);
  if (idx.empty()) throw Error(ErrorCode::kData, "class " + std::to_string(class_id) + " has no bank entries");
  std::uniform_int_distribution<std::size_t> pick(0, idx.size() - 1);
  return augment(bank.entries()[idx[pick(rng)]], params, rng);
}

namespace {

constexpr char kBankMagic[8] = {'A', 'F', 'B', 'A', 'N', 'K', '0', '1'};

}  // namespace

std::vector<std::uint8_t> encode_bank(const ShapeBank& bank) {
  ByteWriter w;
  w.bytes({reinterpret_cast<const std::uint8_t*>(kBankMagic), sizeof(kBankMagic)});
  w.u32(static_cast<std::uint32_t>(bank.class_count()));
  w.u32(static_cast<std::uint32_t>(bank.entries().size()));
  for (Label id = 1; id <= bank.class_count(); ++id) {
    w.u8(bank.class_map().raw_of(id));
    w.u8(id);
  }
  for (const auto& e : bank.entries()) {
    w.u8(e.class_id);
    w.u8(e.raw_class);
    if (e.source_id.size() > 0xffff) throw Error(ErrorCode::kInvalidArgument, "source id too long");
    w.u16(static_cast<std::uint16_t>(e.source_id.size()));
    w.str(e.source_id);
    const Dims d = e.mask.dims();
    w.u32(static_cast<std::uint32_t>(d.x));
    w.u32(static_cast<std::uint32_t>(d.y));
    w.u32(static_cast<std::uint32_t>(d.z));
    std::vector<std::uint8_t> packed((d.count() + 7) / 8, 0);
    const auto bits = e.mask.bits();
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (bits[i]) packed[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    w.bytes(packed);
  }
  return w.take();
}

ShapeBank decode_bank(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const auto magic = r.bytes(sizeof(kBankMagic));
  if (!std::equal(magic.begin(), magic.end(), reinterpret_cast<const std::uint8_t*>(kBankMagic)))
    throw Error(ErrorCode::kFormat, "not a shape bank file (bad magic)");
  const std::uint32_t class_count = r.u32();
  const std::uint32_t entry_count = r.u32();
  if (class_count == 0 || class_count > 255) throw Error(ErrorCode::kFormat, "bank: invalid class count");
  std::vector<Label> raws;
  for (std::uint32_t c = 0; c < class_count; ++c) {
    const Label raw = r.u8();
    const Label id = r.u8();
    if (id != c + 1) throw Error(ErrorCode::kFormat, "bank: class map ids are not contiguous");
    raws.push_back(raw);
  }
  if (!std::is_sorted(raws.begin(), raws.end()))
    throw Error(ErrorCode::kFormat, "bank: class map not in ascending raw order");
  ClassMap class_map(raws);

  std::vector<ShapeEntry> entries;
  entries.reserve(entry_count);
  for (std::uint32_t n = 0; n < entry_count; ++n) {
    ShapeEntry e;
    e.class_id = r.u8();
    e.raw_class = r.u8();
    e.source_id = r.str(r.u16());
    Dims d;
    d.x = static_cast<int>(r.u32());
    d.y = static_cast<int>(r.u32());
    d.z = static_cast<int>(r.u32());
    if (!d.valid() || d.count() > (std::size_t{1} << 31)) throw Error(ErrorCode::kFormat, "bank: bad entry dims");
    const auto packed = r.bytes((d.count() + 7) / 8);
    std::vector<std::uint8_t> bits(d.count());
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = (packed[i / 8] >> (i % 8)) & 1u;
    e.mask = BinaryMask(d, std::move(bits));
    if (e.class_id < 1 || e.class_id > class_count || class_map.raw_of(e.class_id) != e.raw_class)
      throw Error(ErrorCode::kFormat, "bank: entry class does not match class map");
    entries.push_back(std::move(e));
  }
  if (!r.done()) throw Error(ErrorCode::kFormat, "bank: trailing bytes");
  return ShapeBank(std::move(class_map), std::move(entries));
}

void save_bank(const ShapeBank& bank, const std::string& path) { write_file_bytes(path, encode_bank(bank)); }

ShapeBank load_bank(const std::string& path) { return decode_bank(read_file_bytes(path)); }

std::string format_class_map(const ShapeBank& bank, std::span<const std::string> names) {
  std::ostringstream out;
  out << "# raw_label class_id name entries\n";
  for (Label id = 1; id <= bank.class_count(); ++id) {
    std::string name = id <= names.size() && !names[id - 1].empty() ? names[id - 1] : "-";
    out << static_cast<int>(bank.class_map().raw_of(id)) << ' ' << static_cast<int>(id) << ' ' << name << ' '
        << bank.entries_of(id).size() << '\n';
  }
  return out.str();
}

}  // namespace aforge
