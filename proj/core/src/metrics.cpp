#include "rbkit/metrics.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>

namespace rbkit {

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b, const char* who) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(who) + ": length mismatch (" +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                                ")");
  }
  if (a.empty()) throw std::invalid_argument(std::string(who) + ": empty input");
}

}  // namespace

double rmse(std::span<const double> pred, std::span<const double> y) {
  check_lengths(pred, y, "rmse");
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = pred[i] - y[i];
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(y.size()));
}

double accuracy(std::span<const double> pred_labels, std::span<const double> y) {
  check_lengths(pred_labels, y, "accuracy");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y.size(); ++i) hits += pred_labels[i] == y[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(y.size());
}

MetricReport evaluate(Task task, std::span<const double> pred, std::span<const double> y) {
  if (task == Task::Regression) return {MetricKind::RMSE, rmse(pred, y), y.size()};
  return {MetricKind::Accuracy, accuracy(pred, y), y.size()};
}

const char* to_string(MetricKind kind) { return kind == MetricKind::RMSE ? "rmse" : "accuracy"; }

std::vector<std::vector<double>> exact_kernel_ridge_multi(
    const RowMatrix& x_train, std::span<const std::vector<double>> targets,
    const RowMatrix& x_test, const KernelSpec& spec, double lambda) {
  const std::size_t n = x_train.rows();
  if (n == 0) throw std::invalid_argument("exact_kernel_ridge: empty training set");
  if (!(lambda >= 0.0)) throw std::invalid_argument("exact_kernel_ridge: lambda must be >= 0");
  Eigen::MatrixXd k = kernel_gram(spec, x_train);
  k.diagonal().array() += static_cast<double>(n) * lambda + kGramJitter;
  const Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("exact_kernel_ridge: Gram system is not positive definite");
  }
  const Eigen::MatrixXd cross = kernel_cross(spec, x_test, x_train);
  std::vector<std::vector<double>> out;
  out.reserve(targets.size());
  for (const auto& y : targets) {
    if (y.size() != n) throw std::invalid_argument("exact_kernel_ridge: target length mismatch");
    const Eigen::VectorXd alpha =
        llt.solve(Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(n)));
    if (!alpha.allFinite()) throw NumericalError("exact_kernel_ridge: non-finite solution");
    const Eigen::VectorXd pred = cross * alpha;
    out.emplace_back(pred.data(), pred.data() + pred.size());
  }
  return out;
}

std::vector<double> exact_kernel_ridge(const RowMatrix& x_train, std::span<const double> y,
                                       const RowMatrix& x_test, const KernelSpec& spec,
                                       double lambda) {
  const std::vector<std::vector<double>> targets{std::vector<double>(y.begin(), y.end())};
  return exact_kernel_ridge_multi(x_train, targets, x_test, spec, lambda).front();
}

}  // namespace rbkit
