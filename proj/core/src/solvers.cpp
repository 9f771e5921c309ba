#include "rbkit/solvers.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

#include "rbkit/random.hpp"

namespace rbkit {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// out = (Z^T Z + lambda I) v
void normal_apply(const SparseMatrix& z, double lambda, std::span<const double> v,
                  std::vector<double>& scratch, std::span<double> out) {
  z.matvec(v, scratch);
  z.matvec_transpose(scratch, out);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += lambda * v[j];
}

void check_targets(const SparseMatrix& z, std::span<const double> y, const char* who) {
  if (y.size() != z.rows()) {
    throw std::invalid_argument(std::string(who) + ": " + std::to_string(y.size()) +
                                " targets for " + std::to_string(z.rows()) + " rows");
  }
}

}  // namespace

CgResult cg_ridge(const SparseMatrix& z, std::span<const double> y, double lambda,
                  const CgOptions& options) {
  check_targets(z, y, "cg_ridge");
  if (!(lambda > 0.0)) throw std::invalid_argument("cg_ridge: lambda must be positive");
  if (!(options.tol > 0.0)) throw std::invalid_argument("cg_ridge: tol must be positive");

  const std::size_t d = z.cols();
  CgResult result;
  result.w.assign(d, 0.0);

  const std::vector<double> b = z.matvec_transpose(y);
  const double b_norm = norm(b);
  if (b_norm == 0.0) {
    result.converged = true;
    return result;
  }

  std::vector<double> scratch(z.rows());
  std::vector<double> r = b;
  std::vector<double> p = r;
  std::vector<double> ap(d);
  double rr = dot(r, r);

  auto& w = result.w;
  while (result.iterations < options.max_iter) {
    normal_apply(z, lambda, p, scratch, ap);
    const double alpha = rr / dot(p, ap);
    for (std::size_t j = 0; j < d; ++j) {
      w[j] += alpha * p[j];
      r[j] -= alpha * ap[j];
    }
    ++result.iterations;
    if (options.on_iterate) options.on_iterate(result.iterations, w);

    const double rr_next = dot(r, r);
    if (std::sqrt(rr_next) <= options.tol * b_norm) {
      // Confirm against the true residual; restart from it if the recurrence drifted.
      normal_apply(z, lambda, w, scratch, ap);
      for (std::size_t j = 0; j < d; ++j) r[j] = b[j] - ap[j];
      rr = dot(r, r);
      if (std::sqrt(rr) <= options.tol * b_norm) break;
      p = r;
      continue;
    }
    const double beta = rr_next / rr;
    rr = rr_next;
    for (std::size_t j = 0; j < d; ++j) p[j] = r[j] + beta * p[j];
  }

  normal_apply(z, lambda, w, scratch, ap);
  for (std::size_t j = 0; j < d; ++j) r[j] = b[j] - ap[j];
  result.relative_residual = norm(r) / b_norm;
  result.converged = result.relative_residual <= options.tol;
  return result;
}

double prox_l1(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

CdState::CdState(const ColumnView& cols, const LossSpec& loss)
    : w(cols.cols(), 0.0), yhat(cols.rows(), 0.0), curvature(cols.cols(), 0.0) {
  const double scale = loss.beta() / static_cast<double>(cols.rows());
  for (std::size_t j = 0; j < cols.cols(); ++j) curvature[j] = scale * cols.squared_norm(j);
}

double cd_step(CdState& state, std::size_t j, std::span<const double> y, double lambda,
               const ColumnView& cols, const LossSpec& loss) {
  const double m = state.curvature[j];
  if (m <= 0.0) return 0.0;
  const auto rows = cols.column_rows(j);
  const auto vals = cols.column_values(j);
  double g = 0.0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    g += loss.derivative(state.yhat[rows[k]], y[rows[k]]) * vals[k];
  }
  g /= static_cast<double>(cols.rows());

  const double wj = state.w[j];
  const double step = prox_l1(wj - g / m, lambda / m) - wj;
  if (step == 0.0) return 0.0;
  state.w[j] += step;
  for (std::size_t k = 0; k < rows.size(); ++k) state.yhat[rows[k]] += step * vals[k];
  return step;
}

double l1_objective(std::span<const double> w, std::span<const double> yhat,
                    std::span<const double> y, double lambda, const LossSpec& loss) {
  double reg = 0.0;
  for (const double v : w) reg += std::abs(v);
  double data = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) data += loss.value(yhat[i], y[i]);
  return lambda * reg + data / static_cast<double>(y.size());
}

RcdResult rcd_train(const SparseMatrix& z, std::span<const double> y, double lambda,
                    const LossSpec& loss, std::size_t epochs, std::uint64_t seed) {
  check_targets(z, y, "rcd_train");
  if (epochs < 1) throw std::invalid_argument("rcd_train: epochs must be >= 1");
  if (lambda < 0.0) throw std::invalid_argument("rcd_train: lambda must be non-negative");

  const ColumnView cols = z.column_view();
  CdState state(cols, loss);
  Rng rng(seed);
  RcdResult result;
  const std::size_t d = z.cols();
  if (d == 0) {
    result.objective = l1_objective(state.w, state.yhat, y, lambda, loss);
    return result;
  }

  double loop_seconds = 0.0;
  for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
    const auto start = Clock::now();
    for (std::size_t t = 0; t < d; ++t) cd_step(state, rng.index(d), y, lambda, cols, loss);
    loop_seconds += seconds_since(start);
    result.updates += d;
    result.trace.push_back(
        {epoch, l1_objective(state.w, state.yhat, y, lambda, loss), loop_seconds});
  }
  result.seconds = loop_seconds;
  result.w = std::move(state.w);
  const std::vector<double> fresh = z.matvec(result.w);
  result.objective = l1_objective(result.w, fresh, y, lambda, loss);
  return result;
}

RcdResult parallel_rcd_train(const SparseMatrix& z, std::span<const double> y, double lambda,
                             const LossSpec& loss, std::size_t epochs, std::size_t threads,
                             std::uint64_t seed) {
  check_targets(z, y, "parallel_rcd_train");
  if (epochs < 1) throw std::invalid_argument("parallel_rcd_train: epochs must be >= 1");
  if (threads < 1) throw std::invalid_argument("parallel_rcd_train: threads must be >= 1");
  if (lambda < 0.0) throw std::invalid_argument("parallel_rcd_train: lambda must be non-negative");

  const ColumnView cols = z.column_view();
  CdState state(cols, loss);
  const std::size_t d = z.cols();
  const std::size_t total = epochs * d;
  const auto n = static_cast<double>(z.rows());

  auto run_steps = [&](Rng& rng, std::size_t steps) {
    for (std::size_t t = 0; t < steps; ++t) {
      const std::size_t j = rng.index(d);
      const double m = state.curvature[j];
      if (m <= 0.0) continue;
      const auto rows = cols.column_rows(j);
      const auto vals = cols.column_values(j);
      double g = 0.0;
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const double yhat =
            std::atomic_ref<double>(state.yhat[rows[k]]).load(std::memory_order_relaxed);
        g += loss.derivative(yhat, y[rows[k]]) * vals[k];
      }
      g /= n;
      std::atomic_ref<double> wj(state.w[j]);
      const double current = wj.load(std::memory_order_relaxed);
      const double step = prox_l1(current - g / m, lambda / m) - current;
      if (step == 0.0) continue;
      wj.fetch_add(step, std::memory_order_relaxed);
      for (std::size_t k = 0; k < rows.size(); ++k) {
        std::atomic_ref<double>(state.yhat[rows[k]])
            .fetch_add(step * vals[k], std::memory_order_relaxed);
      }
    }
  };

  RcdResult result;
  result.updates = total;
  if (d > 0 && threads == 1) {
    // Inline, epoch by epoch, so the trace matches rcd_train.
    Rng rng(seed);
    for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
      const auto start = Clock::now();
      run_steps(rng, d);
      result.seconds += seconds_since(start);
      result.trace.push_back(
          {epoch, l1_objective(state.w, state.yhat, y, lambda, loss), result.seconds});
    }
  } else if (d > 0) {
    const auto start = Clock::now();
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t id = 0; id < threads; ++id) {
      const std::size_t steps = total / threads + (id < total % threads ? 1 : 0);
      pool.emplace_back([&, id, steps] {
        Rng rng(id == 0 ? seed : Rng::mix_seed(seed, id));
        run_steps(rng, steps);
      });
    }
    for (auto& t : pool) t.join();
    result.seconds = seconds_since(start);
  }
  result.w = std::move(state.w);
  const std::vector<double> fresh = z.matvec(result.w);
  result.objective = l1_objective(result.w, fresh, y, lambda, loss);
  if (threads > 1 || d == 0) result.trace.push_back({epochs, result.objective, result.seconds});
  return result;
}

double predicted_speedup(std::size_t grid_count, std::size_t columns, std::size_t threads) {
  if (columns < 2) throw std::invalid_argument("predicted_speedup: need at least 2 columns");
  if (grid_count < 1 || grid_count > columns) {
    throw std::invalid_argument("predicted_speedup: need 1 <= R <= D");
  }
  if (threads < 1) throw std::invalid_argument("predicted_speedup: threads must be >= 1");
  const double tau = static_cast<double>(threads);
  const double interference = static_cast<double>(grid_count - 1) * (tau - 1.0) /
                              static_cast<double>(columns - 1);
  return tau / (1.0 + interference);
}

}  // namespace rbkit
