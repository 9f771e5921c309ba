#include "rbkit/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "rbkit/random.hpp"
#include "rbkit/solvers.hpp"

namespace rbkit::bench {

const char* const kRunRecordHeader =
    "mode,dataset,method,solver,sigma,R,lambda,threads,seed,D,kappa_bar,transform_seconds,"
    "train_seconds,memory_bytes,metric,train_metric,test_metric,iterations,converged,"
    "objective,predicted_speedup,measured_speedup";

const char* to_string(Solver solver) { return solver == Solver::CG ? "cg" : "cd"; }

Solver solver_from_string(const std::string& name) {
  if (name == "cg") return Solver::CG;
  if (name == "cd") return Solver::CD;
  throw std::invalid_argument("unknown solver: " + name + " (expected cg, cd)");
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// One target vector per head: the labels themselves for regression and
/// binary tasks, +1/-1 one-vs-rest vectors for multiclass.
std::vector<std::vector<double>> head_targets(const Dataset& data) {
  if (data.task != Task::Multiclass) return {data.y};
  std::vector<std::vector<double>> out(data.num_classes(), std::vector<double>(data.size()));
  for (std::size_t c = 0; c < out.size(); ++c) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      out[c][i] = data.y[i] == static_cast<double>(c) ? 1.0 : -1.0;
    }
  }
  return out;
}

RowMatrix stack_rows(const RowMatrix& a, const RowMatrix& b) {
  std::vector<double> values = a.values();
  values.insert(values.end(), b.values().begin(), b.values().end());
  return RowMatrix(a.rows() + b.rows(), a.cols(), std::move(values));
}

MetricKind metric_for(Task task) {
  return task == Task::Regression ? MetricKind::RMSE : MetricKind::Accuracy;
}

double metric_value(Task task, std::span<const double> pred, std::span<const double> y) {
  if (y.empty()) return std::nan("");
  return evaluate(task, pred, y).value;
}

TrainOutcome exact_kernel_run(RunRecord rec, const ExperimentConfig& config, double sigma,
                              const Dataset& train, const Dataset& test) {
  const KernelSpec spec{KernelKind::Laplacian, sigma, train.dim()};
  const auto targets = head_targets(train);
  const auto start = Clock::now();
  const RowMatrix both = stack_rows(train.x, test.x);
  const auto scores = exact_kernel_ridge_multi(train.x, targets, both, spec, config.lambda);
  rec.train_seconds = seconds_since(start);
  rec.memory_bytes = train.size() * train.size() * sizeof(double);

  std::vector<std::vector<double>> train_scores;
  std::vector<std::vector<double>> test_scores;
  for (const auto& s : scores) {
    train_scores.emplace_back(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(train.size()));
    test_scores.emplace_back(s.begin() + static_cast<std::ptrdiff_t>(train.size()), s.end());
  }
  rec.train_metric = metric_value(train.task, decide(train.task, train_scores), train.y);
  rec.test_metric = metric_value(train.task, decide(train.task, test_scores), test.y);
  return {rec, std::nullopt, {}};
}

}  // namespace

TrainOutcome train_and_evaluate(const ExperimentConfig& config, Method method, double sigma,
                                std::size_t rank, std::size_t threads, const Dataset& train,
                                const Dataset& test) {
  if (rank < 1) throw std::invalid_argument("train_and_evaluate: R must be >= 1");
  if (train.size() == 0) throw std::invalid_argument("train_and_evaluate: empty training set");
  if (test.size() > 0 && test.dim() != train.dim()) {
    throw std::invalid_argument("train_and_evaluate: train/test dimension mismatch");
  }

  RunRecord rec;
  rec.dataset = config.dataset;
  rec.method = method;
  rec.solver = config.solver;
  rec.sigma = sigma;
  rec.rank = rank;
  rec.lambda = config.lambda;
  rec.threads = threads;
  rec.seed = config.seed;
  rec.metric = metric_for(train.task);

  if (method == Method::ExactKernel) {
    rec.solver = Solver::CG;  // reported solver column is meaningless here
    rec.rank = train.size();
    return exact_kernel_run(std::move(rec), config, sigma, train, test);
  }

  const KernelSpec spec{KernelKind::Laplacian, sigma, train.dim()};
  Rng rng(config.seed);
  auto start = Clock::now();
  FeatureMap map = FeatureMap::fit(method, train.x, spec, rank, rng);
  const SparseMatrix z_train = map.features(train.x);
  const SparseMatrix z_test = test.size() > 0 ? map.features(test.x) : SparseMatrix(0, map.num_features());
  rec.transform_seconds = seconds_since(start);
  rec.memory_bytes = map.storage_bytes(z_train);
  if (method == Method::RB) {
    rec.columns = map.num_features();
    rec.kappa_bar = static_cast<double>(map.num_features()) / static_cast<double>(rank);
  }

  const auto targets = head_targets(train);
  std::vector<Model> heads;
  std::vector<EpochTrace> trace;
  double objective = 0.0;
  for (std::size_t h = 0; h < targets.size(); ++h) {
    Model model;
    model.lambda = config.lambda;
    if (config.solver == Solver::CG) {
      const double system_lambda =
          config.scale_lambda_by_n ? config.lambda * static_cast<double>(train.size()) : config.lambda;
      CgOptions options;
      options.tol = config.tol;
      options.max_iter = config.max_iter;
      start = Clock::now();
      CgResult cg = cg_ridge(z_train, targets[h], system_lambda, options);
      rec.train_seconds += seconds_since(start);
      rec.iterations += cg.iterations;
      rec.converged = rec.converged && cg.converged;
      model.w = std::move(cg.w);
      model.loss = LossSpec{LossKind::Square};
      model.regularizer = Regularizer::L2;
    } else {
      const LossSpec loss{config.loss};
      RcdResult cd = parallel_rcd_train(z_train, targets[h], config.lambda, loss, config.epochs,
                                        threads, Rng::mix_seed(config.seed, h));
      rec.train_seconds += cd.seconds;
      rec.iterations += cd.updates;
      objective += cd.objective;
      if (h == 0) trace = cd.trace;
      model.w = std::move(cd.w);
      model.loss = loss;
      model.regularizer = Regularizer::L1;
    }
    heads.push_back(std::move(model));
  }
  if (config.solver == Solver::CD) rec.objective = objective;

  std::vector<std::vector<double>> train_scores;
  std::vector<std::vector<double>> test_scores;
  for (const auto& head : heads) {
    train_scores.push_back(decision_scores(head, z_train));
    test_scores.push_back(decision_scores(head, z_test));
  }
  rec.train_metric = metric_value(train.task, decide(train.task, train_scores), train.y);
  rec.test_metric = metric_value(train.task, decide(train.task, test_scores), test.y);
  if (!std::isfinite(rec.train_metric) && !train.y.empty()) rec.converged = false;

  Predictor predictor{train.task, std::move(map), std::move(heads), train.class_labels};
  return {std::move(rec), std::move(predictor), std::move(trace)};
}

std::vector<RunRecord> run_sigma_sweep(const ExperimentConfig& config, const Dataset& train,
                                       const Dataset& test) {
  if (config.sigmas.empty()) throw std::invalid_argument("sweep-sigma: empty sigma grid");
  if (config.ranks.empty() || config.ranks.front() < 1) {
    throw std::invalid_argument("sweep-sigma: R must be >= 1");
  }
  std::vector<RunRecord> out;
  for (const double sigma : config.sigmas) {
    auto outcome =
        train_and_evaluate(config, config.method, sigma, config.ranks.front(),
                           config.threads.front(), train, test);
    outcome.record.mode = "sweep-sigma";
    out.push_back(std::move(outcome.record));
  }
  return out;
}

std::vector<RunRecord> run_r_sweep(const ExperimentConfig& config, const Dataset& train,
                                   const Dataset& test) {
  if (config.ranks.empty()) throw std::invalid_argument("sweep-r: empty R grid");
  for (const auto r : config.ranks) {
    if (r < 1) throw std::invalid_argument("sweep-r: R must be >= 1");
  }
  std::vector<RunRecord> out;
  for (const Method method : config.methods) {
    if (method == Method::ExactKernel) continue;
    for (const std::size_t rank : config.ranks) {
      if (method == Method::Nystrom && rank > train.size()) continue;
      auto outcome = train_and_evaluate(config, method, config.sigmas.front(), rank,
                                        config.threads.front(), train, test);
      outcome.record.mode = "sweep-r";
      out.push_back(std::move(outcome.record));
    }
  }
  return out;
}

bool meets_target(MetricKind kind, double metric, double target) {
  if (!std::isfinite(metric)) return false;
  return kind == MetricKind::RMSE ? metric <= target : metric >= target;
}

std::vector<TargetRow> time_to_target(std::span<const RunRecord> records,
                                      std::span<const Method> methods, double target) {
  std::vector<TargetRow> rows;
  for (const Method method : methods) {
    TargetRow row;
    row.method = method;
    row.target = target;
    std::vector<const RunRecord*> candidates;
    for (const auto& r : records) {
      if (r.method == method) candidates.push_back(&r);
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const RunRecord* a, const RunRecord* b) { return a->rank < b->rank; });
    for (const RunRecord* r : candidates) {
      if (meets_target(r->metric, r->test_metric, target)) {
        row.rank = r->rank;
        row.train_seconds = r->train_seconds;
        row.memory_bytes = r->memory_bytes;
        row.test_metric = r->test_metric;
        break;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

Comparison run_method_comparison(const ExperimentConfig& config, const Dataset& train,
                                 const Dataset& test) {
  if (test.size() == 0) throw std::invalid_argument("compare: a test set is required");
  Comparison cmp;
  auto exact = train_and_evaluate(config, Method::ExactKernel, config.sigmas.front(),
                                  train.size(), 1, train, test);
  exact.record.mode = "compare";
  const MetricKind kind = exact.record.metric;
  cmp.target = config.target.value_or(kind == MetricKind::RMSE
                                          ? exact.record.test_metric * (1.0 + config.target_slack)
                                          : exact.record.test_metric * (1.0 - config.target_slack));
  cmp.records.push_back(exact.record);

  auto sweep = run_r_sweep(config, train, test);
  for (auto& r : sweep) {
    r.mode = "compare";
    cmp.records.push_back(std::move(r));
  }
  std::vector<Method> methods;
  for (const Method m : config.methods) {
    if (m != Method::ExactKernel) methods.push_back(m);
  }
  cmp.targets = time_to_target(cmp.records, methods, cmp.target);
  return cmp;
}

std::vector<RunRecord> run_parallel_bench(const ExperimentConfig& config, const Dataset& train,
                                          const Dataset& test) {
  std::vector<std::size_t> taus = config.threads;
  if (std::find(taus.begin(), taus.end(), std::size_t{1}) == taus.end()) taus.push_back(1);
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
  if (taus.front() < 1) throw std::invalid_argument("parallel-bench: thread counts must be >= 1");

  ExperimentConfig cd = config;
  cd.solver = Solver::CD;
  const std::size_t rank = config.ranks.front();
  std::vector<RunRecord> out;
  for (const Method method : config.methods) {
    if (method == Method::ExactKernel) continue;
    double sequential_seconds = 0.0;
    for (const std::size_t tau : taus) {
      auto outcome =
          train_and_evaluate(cd, method, config.sigmas.front(), rank, tau, train, test);
      RunRecord& rec = outcome.record;
      rec.mode = "parallel-bench";
      if (tau == 1) sequential_seconds = rec.train_seconds;
      rec.measured_speedup = rec.train_seconds > 0.0 ? sequential_seconds / rec.train_seconds
                                                     : std::nan("");
      const std::size_t columns = rec.columns.value_or(rank);
      if (columns >= 2 && rank <= columns) {
        rec.predicted_speedup = predicted_speedup(rank, columns, tau);
      }
      out.push_back(std::move(rec));
    }
  }
  return out;
}

std::string format_value(double v) {
  if (!std::isfinite(v)) return "diverged";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

namespace {

template <typename T>
std::string optional_field(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_floating_point_v<T>) {
    return format_value(*v);
  } else {
    return std::to_string(*v);
  }
}

}  // namespace

void write_csv(std::ostream& out, std::span<const RunRecord> records) {
  out << kRunRecordHeader << '\n';
  for (const auto& r : records) {
    out << r.mode << ',' << r.dataset << ',' << to_string(r.method) << ',' << to_string(r.solver)
        << ',' << format_value(r.sigma) << ',' << r.rank << ',' << format_value(r.lambda) << ','
        << r.threads << ',' << r.seed << ',' << optional_field(r.columns) << ','
        << optional_field(r.kappa_bar) << ',' << format_value(r.transform_seconds) << ','
        << format_value(r.train_seconds) << ',' << r.memory_bytes << ',' << to_string(r.metric)
        << ',' << format_value(r.train_metric) << ',' << format_value(r.test_metric) << ','
        << r.iterations << ',' << (r.converged ? 1 : 0) << ',' << optional_field(r.objective)
        << ',' << optional_field(r.predicted_speedup) << ',' << optional_field(r.measured_speedup)
        << '\n';
  }
}

void write_targets_csv(std::ostream& out, std::span<const TargetRow> rows) {
  out << "method,target,R,train_seconds,memory_bytes,test_metric\n";
  for (const auto& r : rows) {
    out << to_string(r.method) << ',' << format_value(r.target) << ',';
    if (r.rank) {
      out << *r.rank << ',' << format_value(r.train_seconds) << ',' << r.memory_bytes << ','
          << format_value(r.test_metric) << '\n';
    } else {
      out << "not reached,,,\n";
    }
  }
}

void write_trace_csv(std::ostream& out, std::span<const EpochTrace> trace) {
  out << "epoch,objective,seconds\n";
  for (const auto& t : trace) {
    out << t.epoch << ',' << format_value(t.objective) << ',' << format_value(t.seconds) << '\n';
  }
}

}  // namespace rbkit::bench
