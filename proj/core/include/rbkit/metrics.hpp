#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "rbkit/dense.hpp"
#include "rbkit/kernels.hpp"
#include "rbkit/task.hpp"

namespace rbkit {

enum class MetricKind { RMSE, Accuracy };

struct MetricReport {
  MetricKind kind = MetricKind::RMSE;
  double value = 0.0;
  std::size_t n = 0;
};

/// Both throw std::invalid_argument on empty or mismatched inputs.
double rmse(std::span<const double> pred, std::span<const double> y);
double accuracy(std::span<const double> pred_labels, std::span<const double> y);

/// RMSE for regression, accuracy for classification.
MetricReport evaluate(Task task, std::span<const double> pred, std::span<const double> y);

const char* to_string(MetricKind kind);

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gram diagonal jitter added before factorization.
inline constexpr double kGramJitter = 1e-10;

/// Exact kernel ridge regression with the 1/N loss weighting:
/// alpha = (K + N lambda I)^{-1} y, predictions K(test, train) alpha.
/// Throws NumericalError if the system cannot be factorized.
std::vector<double> exact_kernel_ridge(const RowMatrix& x_train, std::span<const double> y,
                                       const RowMatrix& x_test, const KernelSpec& spec,
                                       double lambda);

/// Same, sharing one factorization across several target vectors.
std::vector<std::vector<double>> exact_kernel_ridge_multi(
    const RowMatrix& x_train, std::span<const std::vector<double>> targets,
    const RowMatrix& x_test, const KernelSpec& spec, double lambda);

}  // namespace rbkit
