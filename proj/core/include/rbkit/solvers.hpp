#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rbkit/losses.hpp"
#include "rbkit/sparse_matrix.hpp"

namespace rbkit {

// ---------------------------------------------------------------------------
// Conjugate gradient for ridge regression

struct CgOptions {
  double tol = 1e-3;
  std::size_t max_iter = 1000;
  /// Called after every iteration with the current iterate.
  std::function<void(std::size_t iteration, std::span<const double> w)> on_iterate;
};

struct CgResult {
  std::vector<double> w;
  std::size_t iterations = 0;
  double relative_residual = 0.0;  // ||(Z^T Z + lambda I) w - Z^T y|| / ||Z^T y||
  bool converged = false;
};

/// Solves (Z^T Z + lambda I) w = Z^T y without forming Z^T Z; every iteration
/// costs one product with Z and one with Z^T.
///
/// Throws std::invalid_argument if lambda <= 0, tol <= 0 or y.size() != Z.rows().
/// Hitting max_iter is not an error: the result has converged == false.
CgResult cg_ridge(const SparseMatrix& z, std::span<const double> y, double lambda,
                  const CgOptions& options = {});

// ---------------------------------------------------------------------------
// Randomized coordinate descent for lambda ||w||_1 + (1/N) sum_i L(w.z_i, y_i)

/// Soft-thresholding: 0 if |v| <= t, else v - sign(v) t.
double prox_l1(double v, double t);

/// Weights, maintained responses yhat = Z w, and per-column curvature bounds
/// M_j = beta (1/N) sum_i z_ij^2.
struct CdState {
  CdState(const ColumnView& cols, const LossSpec& loss);

  std::vector<double> w;
  std::vector<double> yhat;
  std::vector<double> curvature;
};

/// Exact minimization of the coordinate-wise quadratic majorizer along column
/// j. Returns the applied step. Columns with zero curvature are left alone.
double cd_step(CdState& state, std::size_t j, std::span<const double> y, double lambda,
               const ColumnView& cols, const LossSpec& loss);

/// lambda ||w||_1 + (1/N) sum_i L(yhat_i, y_i).
double l1_objective(std::span<const double> w, std::span<const double> yhat,
                    std::span<const double> y, double lambda, const LossSpec& loss);

struct EpochTrace {
  std::size_t epoch = 0;
  double objective = 0.0;
  double seconds = 0.0;
};

struct RcdResult {
  std::vector<double> w;
  double objective = 0.0;       // recomputed from Z w at exit
  std::size_t updates = 0;      // coordinate steps taken
  double seconds = 0.0;         // wall time of the update loop
  std::vector<EpochTrace> trace;
};

/// Sequential randomized coordinate descent: epochs * D uniform draws of j,
/// starting from w = 0, yhat = 0. Records the objective after every epoch.
RcdResult rcd_train(const SparseMatrix& z, std::span<const double> y, double lambda,
                    const LossSpec& loss, std::size_t epochs, std::uint64_t seed);

/// Asynchronous parallel variant with `threads` workers sharing w and yhat.
/// Each worker draws coordinates from its own stream (worker 0 uses `seed`
/// itself, so threads == 1 reproduces rcd_train's trajectory) and applies
/// updates with per-element atomic adds. Total updates equal epochs * D.
/// With one thread the trace has one entry per epoch; otherwise a single
/// entry at exit.
RcdResult parallel_rcd_train(const SparseMatrix& z, std::span<const double> y, double lambda,
                             const LossSpec& loss, std::size_t epochs, std::size_t threads,
                             std::uint64_t seed);

/// Modelled speedup of parallel RCD with tau threads when every sample
/// touches at most R of D coordinates: tau / (1 + (R-1)(tau-1)/(D-1)).
/// Throws std::invalid_argument if D < 2, R < 1, R > D or tau < 1.
double predicted_speedup(std::size_t grid_count, std::size_t columns, std::size_t threads);

}  // namespace rbkit
