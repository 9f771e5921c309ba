#include "rbkit/baselines.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <nlohmann/json.hpp>

namespace rbkit {

RfTransform::RfTransform(KernelSpec spec, RowMatrix frequencies, std::vector<double> phases)
    : spec_(spec), frequencies_(std::move(frequencies)), phases_(std::move(phases)) {}

RfTransform RfTransform::fit(const KernelSpec& spec, std::size_t feature_count, Rng& rng) {
  spec.validate();
  if (feature_count < 1) throw std::invalid_argument("RfTransform: feature count must be >= 1");
  RowMatrix omega(feature_count, spec.dim);
  std::vector<double> phases(feature_count);
  for (std::size_t r = 0; r < feature_count; ++r) {
    for (std::size_t j = 0; j < spec.dim; ++j) {
      // Inverse CDF of Cauchy(0, 1/sigma), the spectral density of exp(-|t|/sigma).
      omega(r, j) = std::tan(std::numbers::pi * (rng.uniform_positive() - 0.5)) / spec.sigma;
    }
    phases[r] = 2.0 * std::numbers::pi * rng.uniform();
  }
  return RfTransform(spec, std::move(omega), std::move(phases));
}

RowMatrix RfTransform::transform(const RowMatrix& x) const {
  if (x.cols() != spec_.dim) throw std::invalid_argument("RfTransform::transform: dimension mismatch");
  const std::size_t features = num_features();
  const double scale = std::sqrt(2.0 / static_cast<double>(features));
  RowMatrix z(x.rows(), features);
  for (std::size_t n = 0; n < x.rows(); ++n) {
    const auto point = x.row(n);
    auto out = z.row(n);
    for (std::size_t r = 0; r < features; ++r) {
      const auto w = frequencies_.row(r);
      const double proj = std::inner_product(w.begin(), w.end(), point.begin(), phases_[r]);
      out[r] = scale * std::cos(proj);
    }
  }
  return z;
}

nlohmann::json RfTransform::to_json() const {
  return {{"type", "rf"},
          {"kernel", to_string(spec_.kind)},
          {"sigma", spec_.sigma},
          {"dim", spec_.dim},
          {"frequencies", frequencies_.values()},
          {"phases", phases_}};
}

RfTransform RfTransform::from_json(const nlohmann::json& j) {
  if (j.at("type").get<std::string>() != "rf") {
    throw std::invalid_argument("RfTransform::from_json: not an rf transform");
  }
  KernelSpec spec{kernel_kind_from_string(j.at("kernel").get<std::string>()),
                  j.at("sigma").get<double>(), j.at("dim").get<std::size_t>()};
  spec.validate();
  auto phases = j.at("phases").get<std::vector<double>>();
  RowMatrix omega(phases.size(), spec.dim, j.at("frequencies").get<std::vector<double>>());
  return RfTransform(spec, std::move(omega), std::move(phases));
}

RowMatrix rf_fit_transform(const RowMatrix& x, const KernelSpec& spec, std::size_t feature_count,
                           Rng& rng) {
  return RfTransform::fit(spec, feature_count, rng).transform(x);
}

// ---------------------------------------------------------------------------

NystromTransform::NystromTransform(KernelSpec spec, RowMatrix landmarks,
                                   std::vector<std::size_t> indices)
    : spec_(spec), landmarks_(std::move(landmarks)), landmark_indices_(std::move(indices)) {
  const Eigen::MatrixXd w = kernel_gram(spec_, landmarks_);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w);
  if (eig.info() != Eigen::Success) {
    throw DegenerateKernelError("Nystrom: eigendecomposition of landmark Gram failed");
  }
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double lambda_max = lambda.maxCoeff();
  if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) {
    throw DegenerateKernelError("Nystrom: landmark Gram has no positive eigenvalue");
  }
  const double floor = kEigenFloor * lambda_max;
  Eigen::VectorXd inv_sqrt(lambda.size());
  rank_ = 0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda[i] > floor) {
      inv_sqrt[i] = 1.0 / std::sqrt(lambda[i]);
      ++rank_;
    } else {
      inv_sqrt[i] = 0.0;
    }
  }
  const Eigen::MatrixXd& v = eig.eigenvectors();
  projection_ = v * inv_sqrt.asDiagonal() * v.transpose();
}

NystromTransform NystromTransform::fit(const RowMatrix& x, const KernelSpec& spec,
                                       std::size_t feature_count, Rng& rng) {
  spec.validate();
  if (x.cols() != spec.dim) throw std::invalid_argument("NystromTransform::fit: dimension mismatch");
  if (feature_count < 1 || feature_count > x.rows()) {
    throw std::invalid_argument("NystromTransform::fit: need 1 <= landmarks <= rows (" +
                                std::to_string(feature_count) + " vs " +
                                std::to_string(x.rows()) + ")");
  }
  // Partial Fisher-Yates: first feature_count entries form a uniform sample.
  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < feature_count; ++i) {
    const std::size_t pick = i + rng.index(order.size() - i);
    std::swap(order[i], order[pick]);
  }
  order.resize(feature_count);
  RowMatrix landmarks = x.select_rows(order);
  return NystromTransform(spec, std::move(landmarks), std::move(order));
}

RowMatrix NystromTransform::transform(const RowMatrix& x) const {
  if (x.cols() != spec_.dim) {
    throw std::invalid_argument("NystromTransform::transform: dimension mismatch");
  }
  const Eigen::MatrixXd c = kernel_cross(spec_, x, landmarks_);
  const Eigen::MatrixXd z = c * projection_;
  RowMatrix out(x.rows(), num_features());
  for (std::size_t n = 0; n < x.rows(); ++n) {
    for (std::size_t r = 0; r < num_features(); ++r) {
      out(n, r) = z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(r));
    }
  }
  return out;
}

nlohmann::json NystromTransform::to_json() const {
  return {{"type", "nystrom"},
          {"kernel", to_string(spec_.kind)},
          {"sigma", spec_.sigma},
          {"dim", spec_.dim},
          {"landmark_indices", landmark_indices_},
          {"landmarks", landmarks_.values()}};
}

NystromTransform NystromTransform::from_json(const nlohmann::json& j) {
  if (j.at("type").get<std::string>() != "nystrom") {
    throw std::invalid_argument("NystromTransform::from_json: not a nystrom transform");
  }
  KernelSpec spec{kernel_kind_from_string(j.at("kernel").get<std::string>()),
                  j.at("sigma").get<double>(), j.at("dim").get<std::size_t>()};
  spec.validate();
  auto indices = j.at("landmark_indices").get<std::vector<std::size_t>>();
  RowMatrix landmarks(indices.size(), spec.dim, j.at("landmarks").get<std::vector<double>>());
  return NystromTransform(spec, std::move(landmarks), std::move(indices));
}

}  // namespace rbkit
