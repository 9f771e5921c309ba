#include "rbkit/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rbkit {

void KernelSpec::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("KernelSpec: sigma must be positive and finite");
  }
  if (dim < 1) throw std::invalid_argument("KernelSpec: dim must be at least 1");
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x1,
                   std::span<const double> x2) {
  if (x1.size() != spec.dim || x2.size() != spec.dim) {
    throw std::invalid_argument("kernel_eval: point dimension " + std::to_string(x1.size()) +
                                "/" + std::to_string(x2.size()) + " does not match kernel dim " +
                                std::to_string(spec.dim));
  }
  double l1 = 0.0;
  for (std::size_t j = 0; j < x1.size(); ++j) l1 += std::abs(x1[j] - x2[j]);
  return std::exp(-l1 / spec.sigma);
}

double kernel_eval_1d(const KernelSpec& spec, double delta) {
  return std::exp(-std::abs(delta) / spec.sigma);
}

WidthDistribution::WidthDistribution(const KernelSpec& spec) : spec_(spec) { spec_.validate(); }

double WidthDistribution::sample(std::size_t /*dim_index*/, Rng& rng) const {
  // Every dimension shares sigma; the index is kept for per-dimension kernels.
  const double u1 = rng.uniform_positive();
  const double u2 = rng.uniform_positive();
  return -spec_.sigma * std::log(u1) - spec_.sigma * std::log(u2);
}

double WidthDistribution::mean() const { return 2.0 * spec_.sigma; }

double WidthDistribution::variance() const { return 2.0 * spec_.sigma * spec_.sigma; }

Eigen::MatrixXd kernel_gram(const KernelSpec& spec, const RowMatrix& x) {
  const auto n = static_cast<Eigen::Index>(x.rows());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = kernel_eval(spec, x.row(i), x.row(i));
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = kernel_eval(spec, x.row(i), x.row(j));
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

Eigen::MatrixXd kernel_cross(const KernelSpec& spec, const RowMatrix& a, const RowMatrix& b) {
  Eigen::MatrixXd k(static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(b.rows()));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          kernel_eval(spec, a.row(i), b.row(j));
    }
  }
  return k;
}

const char* to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::Laplacian:
      return "laplacian";
  }
  return "unknown";
}

KernelKind kernel_kind_from_string(const std::string& name) {
  if (name == "laplacian") return KernelKind::Laplacian;
  throw std::invalid_argument("unknown kernel kind: " + name);
}

}  // namespace rbkit
