#include "rbkit/synthetic.hpp"

#include <stdexcept>

#include <Eigen/Cholesky>

#include "rbkit/kernels.hpp"
#include "rbkit/random.hpp"

namespace rbkit {

namespace {

SyntheticSplit split(RowMatrix x, std::vector<double> y, std::size_t n_train, Task task,
                     std::vector<double> class_labels) {
  Dataset all{std::move(x), std::move(y), task, std::move(class_labels)};
  return {all.subset(0, n_train), all.subset(n_train, all.size() - n_train)};
}

}  // namespace

SyntheticSplit make_gp_regression(std::size_t n_train, std::size_t n_test, std::size_t dim,
                                  double kernel_sigma, double noise_std, std::uint64_t seed) {
  if (n_train == 0 || dim == 0) throw std::invalid_argument("make_gp_regression: empty shape");
  const std::size_t n = n_train + n_test;
  Rng rng(seed);
  RowMatrix x(n, dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : x.row(i)) v = rng.uniform();
  }
  const KernelSpec spec{KernelKind::Laplacian, kernel_sigma, dim};
  Eigen::MatrixXd k = kernel_gram(spec, x);
  k.diagonal().array() += 1e-8;
  const Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("make_gp_regression: covariance factorization failed");
  }
  Eigen::VectorXd eps(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < eps.size(); ++i) eps[i] = rng.normal();
  const Eigen::VectorXd f = llt.matrixL() * eps;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = f[static_cast<Eigen::Index>(i)] + noise_std * rng.normal();
  }
  return split(std::move(x), std::move(y), n_train, Task::Regression, {});
}

SyntheticSplit make_mixture_classification(std::size_t n_train, std::size_t n_test,
                                           std::size_t dim, std::size_t blobs_per_class,
                                           double spread, std::uint64_t seed) {
  if (n_train == 0 || dim == 0 || blobs_per_class == 0) {
    throw std::invalid_argument("make_mixture_classification: empty shape");
  }
  const std::size_t n = n_train + n_test;
  Rng rng(seed);
  RowMatrix centers(2 * blobs_per_class, dim);
  for (std::size_t b = 0; b < centers.rows(); ++b) {
    for (auto& v : centers.row(b)) v = rng.uniform();
  }
  RowMatrix x(n, dim);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t blob = rng.index(centers.rows());
    y[i] = blob < blobs_per_class ? -1.0 : 1.0;
    const auto c = centers.row(blob);
    auto row = x.row(i);
    for (std::size_t j = 0; j < dim; ++j) row[j] = c[j] + spread * rng.normal();
  }
  return split(std::move(x), std::move(y), n_train, Task::Binary, {-1.0, 1.0});
}

}  // namespace rbkit
