#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rbkit/dense.hpp"
#include "rbkit/kernels.hpp"
#include "rbkit/random.hpp"
#include "rbkit/sparse_matrix.hpp"

namespace rbkit {

/// Componentwise floor((x_j - u_j) / delta_j), written to `out`.
void bin_index(std::span<const double> x, std::span<const double> widths,
               std::span<const double> offsets, std::span<std::int64_t> out);
std::vector<std::int64_t> bin_index(std::span<const double> x, std::span<const double> widths,
                                    std::span<const double> offsets);

/// One randomly shifted axis-aligned grid plus the dictionary of bins that
/// were occupied during fitting. Bins are numbered in first-occurrence order.
class Grid {
 public:
  /// Requires equal lengths and 0 <= offsets[j] < widths[j].
  Grid(std::vector<double> widths, std::vector<double> offsets);

  static Grid sample(const WidthDistribution& dist, Rng& rng);

  std::size_t dim() const { return widths_.size(); }
  std::span<const double> widths() const { return widths_; }
  std::span<const double> offsets() const { return offsets_; }

  void bin_of(std::span<const double> x, std::span<std::int64_t> key) const;

  std::optional<std::size_t> find(std::span<const std::int64_t> key) const;

  /// Local index of `key`, adding it to the dictionary if unseen.
  std::size_t insert(std::span<const std::int64_t> key);

  std::size_t num_bins() const { return dim() == 0 ? 0 : keys_.size() / dim(); }

  /// Bin coordinates of local bin `b`.
  std::span<const std::int64_t> key(std::size_t b) const {
    return {keys_.data() + b * dim(), dim()};
  }

 private:
  std::uint64_t hash(std::span<const std::int64_t> key) const;
  std::size_t probe(std::span<const std::int64_t> key, std::uint64_t h) const;
  void grow();

  std::vector<double> widths_;
  std::vector<double> offsets_;
  std::vector<std::int64_t> keys_;   // num_bins x dim, flattened
  std::vector<std::uint32_t> slots_; // open addressing, 0 = empty, else local index + 1
};

/// Collision statistics of a dataset under each grid of a transform.
struct CollisionStats {
  std::size_t n = 0;
  std::vector<double> max_occupancy;       // nu per grid: largest bin share
  std::vector<std::size_t> nonempty_bins;  // kappa per grid
  double mean_nonempty_bins = 0.0;
  double mean_inverse_collision = 0.0;     // mean of 1/nu over grids
  double kappa_bar = 0.0;                  // D / R
};

/// Random binning feature map: R grids whose occupied bins become the D
/// columns of a sparse feature matrix with entries 1/sqrt(R).
class RbTransform {
 public:
  /// Draws R grids without building dictionaries (D = 0).
  static RbTransform sample(const KernelSpec& spec, std::size_t grid_count, Rng& rng);

  /// Draws R grids and records every bin occupied by a row of `x`.
  static RbTransform fit(const RowMatrix& x, const KernelSpec& spec, std::size_t grid_count,
                         Rng& rng);

  /// Row n holds one entry per grid whose bin for x_n was seen during fit.
  SparseMatrix transform(const RowMatrix& x) const;

  /// Fraction of grids in which x1 and x2 share a bin. Equals z(x1).z(x2)
  /// whenever both bins are in the dictionaries.
  double approx_kernel(std::span<const double> x1, std::span<const double> x2) const;

  CollisionStats collision_stats(const RowMatrix& x) const;

  const KernelSpec& spec() const { return spec_; }
  std::size_t grid_count() const { return grids_.size(); }
  std::size_t num_features() const { return column_offsets_.back(); }
  double scale() const;
  const std::vector<Grid>& grids() const { return grids_; }
  std::size_t column_offset(std::size_t grid) const { return column_offsets_[grid]; }

  nlohmann::json to_json() const;
  static RbTransform from_json(const nlohmann::json& j);

 private:
  RbTransform(KernelSpec spec, std::vector<Grid> grids);
  void refresh_offsets();

  KernelSpec spec_;
  std::vector<Grid> grids_;
  std::vector<std::size_t> column_offsets_{0};
};

}  // namespace rbkit
