#pragma once

#include <cstddef>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "rbkit/dense.hpp"
#include "rbkit/random.hpp"

namespace rbkit {

enum class KernelKind { Laplacian };

/// Shift-invariant product kernel k(x1, x2) = prod_j k_j(x1_j - x2_j).
struct KernelSpec {
  KernelKind kind = KernelKind::Laplacian;
  double sigma = 1.0;
  std::size_t dim = 1;

  /// Throws std::invalid_argument unless sigma > 0 and dim >= 1.
  void validate() const;
};

/// exp(-||x1 - x2||_1 / sigma) for the Laplacian kernel.
double kernel_eval(const KernelSpec& spec, std::span<const double> x1,
                   std::span<const double> x2);

/// One-dimensional factor k_j(delta).
double kernel_eval_1d(const KernelSpec& spec, double delta);

/// Bin-width sampler with density proportional to delta * k''(delta).
///
/// For the Laplacian kernel k''(delta) = exp(-delta/sigma)/sigma^2, so widths
/// follow Gamma(shape 2, scale sigma), drawn as the sum of two exponentials.
class WidthDistribution {
 public:
  explicit WidthDistribution(const KernelSpec& spec);

  double sample(std::size_t dim_index, Rng& rng) const;

  double mean() const;
  double variance() const;

  const KernelSpec& spec() const { return spec_; }

 private:
  KernelSpec spec_;
};

/// Dense Gram matrix K[i][j] = k(x_i, x_j). Desk-scale use only.
Eigen::MatrixXd kernel_gram(const KernelSpec& spec, const RowMatrix& x);

/// Cross kernel matrix K[i][j] = k(a_i, b_j).
Eigen::MatrixXd kernel_cross(const KernelSpec& spec, const RowMatrix& a, const RowMatrix& b);

const char* to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);

}  // namespace rbkit
