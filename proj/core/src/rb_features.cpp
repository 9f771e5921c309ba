#include "rbkit/rb_features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace rbkit {

namespace {

std::int64_t floor_to_int64(double v) {
  constexpr double kMax = 9.0e18;
  if (!std::isfinite(v)) throw std::invalid_argument("bin_index: non-finite coordinate");
  const double f = std::floor(v);
  if (f >= kMax) return static_cast<std::int64_t>(kMax);
  if (f <= -kMax) return static_cast<std::int64_t>(-kMax);
  return static_cast<std::int64_t>(f);
}

}  // namespace

void bin_index(std::span<const double> x, std::span<const double> widths,
               std::span<const double> offsets, std::span<std::int64_t> out) {
  if (x.size() != widths.size() || x.size() != offsets.size() || x.size() != out.size()) {
    throw std::invalid_argument("bin_index: dimension mismatch");
  }
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = floor_to_int64((x[j] - offsets[j]) / widths[j]);
}

std::vector<std::int64_t> bin_index(std::span<const double> x, std::span<const double> widths,
                                    std::span<const double> offsets) {
  std::vector<std::int64_t> out(x.size());
  bin_index(x, widths, offsets, out);
  return out;
}

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(std::vector<double> widths, std::vector<double> offsets)
    : widths_(std::move(widths)), offsets_(std::move(offsets)) {
  if (widths_.size() != offsets_.size() || widths_.empty()) {
    throw std::invalid_argument("Grid: widths and offsets must be non-empty and equal length");
  }
  for (std::size_t j = 0; j < widths_.size(); ++j) {
    if (!(widths_[j] > 0.0) || !std::isfinite(widths_[j])) {
      throw std::invalid_argument("Grid: widths must be positive and finite");
    }
    if (!(offsets_[j] >= 0.0 && offsets_[j] < widths_[j])) {
      throw std::invalid_argument("Grid: offset outside [0, width) in dimension " +
                                  std::to_string(j));
    }
  }
}

Grid Grid::sample(const WidthDistribution& dist, Rng& rng) {
  const std::size_t d = dist.spec().dim;
  std::vector<double> widths(d);
  std::vector<double> offsets(d);
  for (std::size_t j = 0; j < d; ++j) {
    widths[j] = dist.sample(j, rng);
    // Product rounding can land exactly on the width.
    offsets[j] = std::min(rng.uniform() * widths[j], std::nextafter(widths[j], 0.0));
  }
  return Grid(std::move(widths), std::move(offsets));
}

void Grid::bin_of(std::span<const double> x, std::span<std::int64_t> key) const {
  bin_index(x, widths_, offsets_, key);
}

std::uint64_t Grid::hash(std::span<const std::int64_t> key) const {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (const std::int64_t v : key) h = Rng::mix_seed(h, static_cast<std::uint64_t>(v));
  return h;
}

std::size_t Grid::probe(std::span<const std::int64_t> key, std::uint64_t h) const {
  const std::size_t mask = slots_.size() - 1;
  std::size_t pos = static_cast<std::size_t>(h) & mask;
  while (true) {
    const std::uint32_t slot = slots_[pos];
    if (slot == 0) return pos;
    const auto stored = this->key(slot - 1);
    if (std::equal(stored.begin(), stored.end(), key.begin())) return pos;
    pos = (pos + 1) & mask;
  }
}

std::optional<std::size_t> Grid::find(std::span<const std::int64_t> key) const {
  if (slots_.empty()) return std::nullopt;
  const std::uint32_t slot = slots_[probe(key, hash(key))];
  if (slot == 0) return std::nullopt;
  return slot - 1;
}

std::size_t Grid::insert(std::span<const std::int64_t> key) {
  if (key.size() != dim()) throw std::invalid_argument("Grid::insert: key dimension mismatch");
  if ((num_bins() + 1) * 2 > slots_.size()) grow();
  const std::size_t pos = probe(key, hash(key));
  if (slots_[pos] != 0) return slots_[pos] - 1;
  const std::size_t local = num_bins();
  if (local + 1 >= std::numeric_limits<std::uint32_t>::max()) {
    throw std::length_error("Grid: too many bins");
  }
  keys_.insert(keys_.end(), key.begin(), key.end());
  slots_[pos] = static_cast<std::uint32_t>(local + 1);
  return local;
}

void Grid::grow() {
  const std::size_t capacity = std::max<std::size_t>(16, slots_.size() * 2);
  slots_.assign(capacity, 0);
  const std::size_t mask = capacity - 1;
  for (std::size_t b = 0; b < num_bins(); ++b) {
    std::size_t pos = static_cast<std::size_t>(hash(key(b))) & mask;
    while (slots_[pos] != 0) pos = (pos + 1) & mask;
    slots_[pos] = static_cast<std::uint32_t>(b + 1);
  }
}

// ---------------------------------------------------------------------------
// RbTransform

RbTransform::RbTransform(KernelSpec spec, std::vector<Grid> grids)
    : spec_(spec), grids_(std::move(grids)) {
  refresh_offsets();
}

void RbTransform::refresh_offsets() {
  column_offsets_.assign(grids_.size() + 1, 0);
  for (std::size_t r = 0; r < grids_.size(); ++r) {
    column_offsets_[r + 1] = column_offsets_[r] + grids_[r].num_bins();
  }
}

RbTransform RbTransform::sample(const KernelSpec& spec, std::size_t grid_count, Rng& rng) {
  spec.validate();
  if (grid_count < 1) throw std::invalid_argument("RbTransform: grid count must be >= 1");
  const WidthDistribution dist(spec);
  std::vector<Grid> grids;
  grids.reserve(grid_count);
  for (std::size_t r = 0; r < grid_count; ++r) {
    Rng grid_rng(rng.fork());
    grids.push_back(Grid::sample(dist, grid_rng));
  }
  return RbTransform(spec, std::move(grids));
}

RbTransform RbTransform::fit(const RowMatrix& x, const KernelSpec& spec, std::size_t grid_count,
                             Rng& rng) {
  if (x.rows() < 1) throw std::invalid_argument("RbTransform::fit: empty training set");
  if (x.cols() != spec.dim) {
    throw std::invalid_argument("RbTransform::fit: data dimension " + std::to_string(x.cols()) +
                                " does not match kernel dim " + std::to_string(spec.dim));
  }
  RbTransform t = sample(spec, grid_count, rng);
  std::vector<std::int64_t> key(spec.dim);
  for (auto& grid : t.grids_) {
    for (std::size_t n = 0; n < x.rows(); ++n) {
      grid.bin_of(x.row(n), key);
      grid.insert(key);
    }
  }
  t.refresh_offsets();
  return t;
}

double RbTransform::scale() const { return 1.0 / std::sqrt(static_cast<double>(grids_.size())); }

SparseMatrix RbTransform::transform(const RowMatrix& x) const {
  if (x.cols() != spec_.dim) {
    throw std::invalid_argument("RbTransform::transform: data dimension " +
                                std::to_string(x.cols()) + " does not match kernel dim " +
                                std::to_string(spec_.dim));
  }
  const double value = scale();
  std::vector<std::size_t> row_ptr(x.rows() + 1, 0);
  std::vector<Index> col_idx;
  col_idx.reserve(x.rows() * grids_.size());
  std::vector<std::int64_t> key(spec_.dim);
  for (std::size_t n = 0; n < x.rows(); ++n) {
    const auto point = x.row(n);
    for (std::size_t r = 0; r < grids_.size(); ++r) {
      grids_[r].bin_of(point, key);
      if (const auto local = grids_[r].find(key)) {
        col_idx.push_back(static_cast<Index>(column_offsets_[r] + *local));
      }
    }
    row_ptr[n + 1] = col_idx.size();
  }
  std::vector<double> values(col_idx.size(), value);
  return SparseMatrix::from_csr(x.rows(), num_features(), std::move(row_ptr), std::move(col_idx),
                                std::move(values));
}

double RbTransform::approx_kernel(std::span<const double> x1, std::span<const double> x2) const {
  if (x1.size() != spec_.dim || x2.size() != spec_.dim) {
    throw std::invalid_argument("RbTransform::approx_kernel: dimension mismatch");
  }
  std::vector<std::int64_t> k1(spec_.dim);
  std::vector<std::int64_t> k2(spec_.dim);
  std::size_t collisions = 0;
  for (const auto& grid : grids_) {
    grid.bin_of(x1, k1);
    grid.bin_of(x2, k2);
    if (k1 == k2) ++collisions;
  }
  return static_cast<double>(collisions) / static_cast<double>(grids_.size());
}

CollisionStats RbTransform::collision_stats(const RowMatrix& x) const {
  if (x.rows() < 1) throw std::invalid_argument("collision_stats: empty dataset");
  if (x.cols() != spec_.dim) throw std::invalid_argument("collision_stats: dimension mismatch");
  CollisionStats stats;
  stats.n = x.rows();
  stats.max_occupancy.reserve(grids_.size());
  stats.nonempty_bins.reserve(grids_.size());
  std::vector<std::int64_t> key(spec_.dim);
  std::vector<std::size_t> counts;
  for (const auto& grid : grids_) {
    Grid occupancy(std::vector<double>(grid.widths().begin(), grid.widths().end()),
                   std::vector<double>(grid.offsets().begin(), grid.offsets().end()));
    counts.clear();
    for (std::size_t n = 0; n < x.rows(); ++n) {
      grid.bin_of(x.row(n), key);
      const std::size_t b = occupancy.insert(key);
      if (b == counts.size()) counts.push_back(0);
      ++counts[b];
    }
    const std::size_t max_count = *std::max_element(counts.begin(), counts.end());
    const double nu = static_cast<double>(max_count) / static_cast<double>(x.rows());
    stats.max_occupancy.push_back(nu);
    stats.nonempty_bins.push_back(counts.size());
    stats.mean_nonempty_bins += static_cast<double>(counts.size());
    stats.mean_inverse_collision += 1.0 / nu;
  }
  const auto r = static_cast<double>(grids_.size());
  stats.mean_nonempty_bins /= r;
  stats.mean_inverse_collision /= r;
  stats.kappa_bar = static_cast<double>(num_features()) / r;
  return stats;
}

nlohmann::json RbTransform::to_json() const {
  nlohmann::json grids = nlohmann::json::array();
  for (const auto& g : grids_) {
    nlohmann::json bins = nlohmann::json::array();
    for (std::size_t b = 0; b < g.num_bins(); ++b) {
      const auto k = g.key(b);
      bins.push_back(std::vector<std::int64_t>(k.begin(), k.end()));
    }
    grids.push_back({{"widths", std::vector<double>(g.widths().begin(), g.widths().end())},
                     {"offsets", std::vector<double>(g.offsets().begin(), g.offsets().end())},
                     {"bins", std::move(bins)}});
  }
  return {{"type", "rb"},
          {"kernel", to_string(spec_.kind)},
          {"sigma", spec_.sigma},
          {"dim", spec_.dim},
          {"num_features", num_features()},
          {"grids", std::move(grids)}};
}

RbTransform RbTransform::from_json(const nlohmann::json& j) {
  if (j.at("type").get<std::string>() != "rb") {
    throw std::invalid_argument("RbTransform::from_json: not an rb transform");
  }
  KernelSpec spec{kernel_kind_from_string(j.at("kernel").get<std::string>()),
                  j.at("sigma").get<double>(), j.at("dim").get<std::size_t>()};
  spec.validate();
  std::vector<Grid> grids;
  for (const auto& g : j.at("grids")) {
    Grid grid(g.at("widths").get<std::vector<double>>(), g.at("offsets").get<std::vector<double>>());
    if (grid.dim() != spec.dim) throw std::invalid_argument("RbTransform::from_json: grid dim");
    for (const auto& b : g.at("bins")) {
      const auto key = b.get<std::vector<std::int64_t>>();
      if (grid.insert(key) + 1 != grid.num_bins()) {
        throw std::invalid_argument("RbTransform::from_json: duplicate bin");
      }
    }
    grids.push_back(std::move(grid));
  }
  if (grids.empty()) throw std::invalid_argument("RbTransform::from_json: no grids");
  RbTransform t(spec, std::move(grids));
  if (j.contains("num_features") && j.at("num_features").get<std::size_t>() != t.num_features()) {
    throw std::invalid_argument("RbTransform::from_json: column count mismatch");
  }
  return t;
}

}  // namespace rbkit
