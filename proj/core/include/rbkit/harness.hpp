#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rbkit/data_io.hpp"
#include "rbkit/feature_map.hpp"
#include "rbkit/losses.hpp"
#include "rbkit/metrics.hpp"
#include "rbkit/model.hpp"
#include "rbkit/solvers.hpp"

namespace rbkit::bench {

enum class Solver { CG, CD };

const char* to_string(Solver solver);
Solver solver_from_string(const std::string& name);

/// One experiment. Sweep modes read the grid fields (`sigmas`, `ranks`,
/// `threads`); single runs use their first element.
struct ExperimentConfig {
  std::string dataset = "data";
  Method method = Method::RB;
  /// Methods swept by r-sweep / compare / parallel-bench.
  std::vector<Method> methods{Method::RB, Method::RF, Method::Nystrom};
  std::vector<double> sigmas{1.0};
  std::vector<std::size_t> ranks{64};
  double lambda = 0.01;
  Solver solver = Solver::CG;
  LossKind loss = LossKind::Square;
  double tol = 1e-3;
  std::size_t max_iter = 1000;
  std::size_t epochs = 10;
  std::vector<std::size_t> threads{1};
  std::uint64_t seed = 1;
  /// CG solves (Z^T Z + N lambda I) w = Z^T y so lambda means the same thing
  /// as in the exact kernel system (K + N lambda I).
  bool scale_lambda_by_n = true;
  /// Comparison target; defaults to the exact-kernel metric with `target_slack`.
  std::optional<double> target;
  double target_slack = 0.05;
};

struct RunRecord {
  std::string mode;
  std::string dataset;
  Method method = Method::RB;
  Solver solver = Solver::CG;
  double sigma = 0.0;
  std::size_t rank = 0;
  double lambda = 0.0;
  std::size_t threads = 1;
  std::uint64_t seed = 0;
  std::optional<std::size_t> columns;  // D, RB only
  std::optional<double> kappa_bar;     // D / R, RB only
  double transform_seconds = 0.0;
  double train_seconds = 0.0;
  std::size_t memory_bytes = 0;
  MetricKind metric = MetricKind::RMSE;
  double train_metric = 0.0;
  double test_metric = 0.0;
  std::size_t iterations = 0;
  bool converged = true;
  std::optional<double> objective;
  std::optional<double> predicted_speedup;
  std::optional<double> measured_speedup;
};

/// The fixed CSV header; write_csv emits one line per record after it.
extern const char* const kRunRecordHeader;

/// Trained model plus the record describing how it was obtained.
struct TrainOutcome {
  RunRecord record;
  std::optional<Predictor> predictor;  // empty for the exact kernel
  std::vector<EpochTrace> trace;       // CD only, first head
};

/// Fits `method` with kernel width `sigma` and size `rank`, trains with the
/// configured solver, and evaluates on both sets.
TrainOutcome train_and_evaluate(const ExperimentConfig& config, Method method, double sigma,
                                std::size_t rank, std::size_t threads, const Dataset& train,
                                const Dataset& test);

/// One record per sigma in config.sigmas, with rank config.ranks.front().
std::vector<RunRecord> run_sigma_sweep(const ExperimentConfig& config, const Dataset& train,
                                       const Dataset& test);

/// One record per (method, R) with sigma config.sigmas.front(). Nystrom ranks
/// above the training size are skipped.
std::vector<RunRecord> run_r_sweep(const ExperimentConfig& config, const Dataset& train,
                                   const Dataset& test);

struct TargetRow {
  Method method = Method::RB;
  double target = 0.0;
  std::optional<std::size_t> rank;  // empty: not reached
  double train_seconds = 0.0;
  std::size_t memory_bytes = 0;
  double test_metric = 0.0;
};

struct Comparison {
  std::vector<RunRecord> records;  // exact kernel first, then the R sweep
  std::vector<TargetRow> targets;
  double target = 0.0;
};

/// True if `metric` is at least as good as `target`.
bool meets_target(MetricKind kind, double metric, double target);

/// Smallest swept R at which each method reaches the target.
std::vector<TargetRow> time_to_target(std::span<const RunRecord> records,
                                      std::span<const Method> methods, double target);

Comparison run_method_comparison(const ExperimentConfig& config, const Dataset& train,
                                 const Dataset& test);

/// CD with each thread count in config.threads for every method in
/// config.methods (RB and RF by default when called from the CLI). Speedups
/// are relative to the one-thread run, which is added if absent.
std::vector<RunRecord> run_parallel_bench(const ExperimentConfig& config, const Dataset& train,
                                          const Dataset& test);

void write_csv(std::ostream& out, std::span<const RunRecord> records);
void write_targets_csv(std::ostream& out, std::span<const TargetRow> rows);
void write_trace_csv(std::ostream& out, std::span<const EpochTrace> trace);

/// Decimal rendering for CSV; non-finite values become "diverged".
std::string format_value(double v);

}  // namespace rbkit::bench
