#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "rbkit/dense.hpp"
#include "rbkit/kernels.hpp"
#include "rbkit/random.hpp"

namespace rbkit {

/// Random Fourier features for the Laplacian kernel:
/// z_r(x) = sqrt(2/R) cos(omega_r . x + b_r), omega_rj ~ Cauchy(0, 1/sigma).
class RfTransform {
 public:
  static RfTransform fit(const KernelSpec& spec, std::size_t feature_count, Rng& rng);

  RowMatrix transform(const RowMatrix& x) const;

  const KernelSpec& spec() const { return spec_; }
  std::size_t num_features() const { return phases_.size(); }
  const RowMatrix& frequencies() const { return frequencies_; }
  const std::vector<double>& phases() const { return phases_; }

  nlohmann::json to_json() const;
  static RfTransform from_json(const nlohmann::json& j);

 private:
  RfTransform(KernelSpec spec, RowMatrix frequencies, std::vector<double> phases);

  KernelSpec spec_;
  RowMatrix frequencies_;  // R x d
  std::vector<double> phases_;
};

/// Fits a fresh RF map and applies it to `x`.
RowMatrix rf_fit_transform(const RowMatrix& x, const KernelSpec& spec, std::size_t feature_count,
                           Rng& rng);

class DegenerateKernelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Plain Nystrom map with uniformly sampled landmarks:
/// z(x) = W^{-1/2} [k(x, s)]_{s in S}, W = K(S, S).
///
/// Eigenvalues of W below 1e-12 * lambda_max are dropped from the inverse
/// square root, so duplicated landmarks reduce the rank instead of failing.
class NystromTransform {
 public:
  static constexpr double kEigenFloor = 1e-12;

  /// Throws std::invalid_argument if feature_count > rows, and
  /// DegenerateKernelError if no eigenvalue of W survives the floor.
  static NystromTransform fit(const RowMatrix& x, const KernelSpec& spec,
                              std::size_t feature_count, Rng& rng);

  RowMatrix transform(const RowMatrix& x) const;

  const KernelSpec& spec() const { return spec_; }
  std::size_t num_features() const { return landmarks_.rows(); }
  std::size_t rank() const { return rank_; }
  const RowMatrix& landmarks() const { return landmarks_; }
  const std::vector<std::size_t>& landmark_indices() const { return landmark_indices_; }

  nlohmann::json to_json() const;
  static NystromTransform from_json(const nlohmann::json& j);

 private:
  NystromTransform(KernelSpec spec, RowMatrix landmarks, std::vector<std::size_t> indices);

  KernelSpec spec_;
  RowMatrix landmarks_;
  std::vector<std::size_t> landmark_indices_;
  Eigen::MatrixXd projection_;  // symmetric W^{-1/2}
  std::size_t rank_ = 0;
};

}  // namespace rbkit
