#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rbkit/data_io.hpp"
#include "rbkit/feature_map.hpp"
#include "rbkit/harness.hpp"
#include "rbkit/metrics.hpp"
#include "rbkit/model.hpp"
#include "rbkit/random.hpp"
#include "rbkit/rb_features.hpp"
#include "rbkit/synthetic.hpp"

namespace {

using namespace rbkit;
using bench::ExperimentConfig;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string data;
  std::string test;
  std::vector<std::string> methods{"rb"};
  std::vector<double> sigmas{1.0};
  std::vector<std::size_t> ranks{64};
  double lambda = 0.01;
  std::string loss = "square";
  std::string solver = "cg";
  double tol = 1e-3;
  std::size_t max_iter = 1000;
  std::size_t epochs = 10;
  std::vector<std::size_t> threads{1};
  std::uint64_t seed = 1;
  std::string out;

  std::string model;
  std::string trace_out;
  std::string targets_out;
  std::optional<double> target;
  double holdout = 0.2;
  bool scale = false;
  std::optional<std::size_t> dim;
  std::string task;

  std::string synthetic;
  std::size_t n_train = 2000;
  std::size_t n_test = 500;
  std::size_t synth_dim = 8;
  std::optional<double> synth_sigma;
  double noise = 0.1;
};

struct Inputs {
  std::string name;
  Dataset train;
  Dataset test;
  std::optional<ScalingParams> scaling;
};

Dataset shuffle_rows(const Dataset& data, std::uint64_t seed) {
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(Rng::mix_seed(seed, 0x5eed));
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
  Dataset out = data;
  out.x = data.x.select_rows(order);
  for (std::size_t i = 0; i < order.size(); ++i) out.y[i] = data.y[order[i]];
  return out;
}

std::string stem_of(const std::string& path) {
  auto name = std::filesystem::path(path).filename().string();
  for (const char* ext : {".gz", ".txt", ".libsvm", ".svm"}) {
    const std::string e(ext);
    if (name.size() > e.size() && name.ends_with(e)) name.resize(name.size() - e.size());
  }
  return name;
}

Inputs load_inputs(const Options& opt, bool need_test) {
  Inputs in;
  if (!opt.synthetic.empty()) {
    SyntheticSplit split;
    if (opt.synthetic == "gp") {
      split = make_gp_regression(opt.n_train, opt.n_test, opt.synth_dim,
                                 opt.synth_sigma.value_or(2.0), opt.noise, opt.seed);
    } else if (opt.synthetic == "mixture") {
      split = make_mixture_classification(opt.n_train, opt.n_test, opt.synth_dim, 3,
                                          opt.synth_sigma.value_or(0.1), opt.seed);
    } else {
      throw ConfigError("unknown --synthetic generator '" + opt.synthetic + "' (expected gp, mixture)");
    }
    in.name = "synthetic-" + opt.synthetic;
    in.train = std::move(split.train);
    in.test = std::move(split.test);
  } else {
    if (opt.data.empty()) throw ConfigError("--data (or --synthetic) is required");
    LoadOptions lo;
    lo.dim_hint = opt.dim;
    if (!opt.task.empty()) lo.task = task_from_string(opt.task);
    in.name = stem_of(opt.data);
    in.train = load_libsvm(opt.data, lo);
    if (!opt.test.empty()) {
      LoadOptions to;
      to.dim_hint = in.train.dim();
      to.task = in.train.task;
      to.class_labels = in.train.class_labels;
      in.test = load_libsvm(opt.test, to);
    } else if (need_test) {
      if (!(opt.holdout > 0.0 && opt.holdout < 1.0)) {
        throw ConfigError("--holdout must lie in (0, 1) when --test is omitted");
      }
      const Dataset all = shuffle_rows(in.train, opt.seed);
      const auto n_test = static_cast<std::size_t>(static_cast<double>(all.size()) * opt.holdout);
      if (n_test == 0 || n_test == all.size()) throw ConfigError("--holdout leaves an empty split");
      in.train = all.subset(0, all.size() - n_test);
      in.test = all.subset(all.size() - n_test, n_test);
    }
  }
  if (in.test.size() == 0) in.test.x = RowMatrix(0, in.train.dim());
  if (opt.scale) {
    auto scaled = scale_features(in.train, in.test);
    in.train = std::move(scaled.train);
    in.test = std::move(scaled.test);
    in.scaling = std::move(scaled.params);
  }
  return in;
}

ExperimentConfig make_config(const Options& opt, const std::string& dataset) {
  ExperimentConfig c;
  c.dataset = dataset;
  c.methods.clear();
  for (const auto& m : opt.methods) c.methods.push_back(method_from_string(m));
  if (c.methods.empty()) throw ConfigError("--method needs at least one value");
  c.method = c.methods.front();
  c.sigmas = opt.sigmas;
  for (const double s : c.sigmas) {
    if (!(s > 0.0)) throw ConfigError("--sigma values must be positive");
  }
  c.ranks = opt.ranks;
  for (const auto r : c.ranks) {
    if (r < 1) throw ConfigError("--r values must be >= 1");
  }
  c.lambda = opt.lambda;
  if (!(c.lambda > 0.0)) throw ConfigError("--lambda must be positive");
  c.solver = bench::solver_from_string(opt.solver);
  c.loss = loss_kind_from_string(opt.loss);
  if (c.solver == bench::Solver::CG && c.loss != LossKind::Square) {
    throw ConfigError("--solver cg supports only --loss square");
  }
  c.tol = opt.tol;
  if (!(c.tol > 0.0)) throw ConfigError("--tol must be positive");
  c.max_iter = opt.max_iter;
  c.epochs = opt.epochs;
  if (c.epochs < 1) throw ConfigError("--epochs must be >= 1");
  c.threads = opt.threads;
  for (const auto t : c.threads) {
    if (t < 1) throw ConfigError("--threads values must be >= 1");
  }
  c.seed = opt.seed;
  c.target = opt.target;
  return c;
}

template <typename Write>
void write_out(const std::string& path, Write&& write) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write(out);
  if (!out) throw std::runtime_error("failed writing " + path);
}

std::string brief(double v) {
  if (!std::isfinite(v)) return "diverged";
  std::ostringstream out;
  out << std::setprecision(4) << v;
  return out.str();
}

void print_record(const bench::RunRecord& r) {
  std::cout << std::left << std::setw(8) << to_string(r.method) << " sigma=" << std::setw(8)
            << brief(r.sigma) << " R=" << std::setw(6) << r.rank;
  if (r.columns) std::cout << " D=" << std::setw(7) << *r.columns;
  std::cout << " tau=" << r.threads << " " << to_string(r.metric)
            << " train=" << brief(r.train_metric)
            << " test=" << brief(r.test_metric)
            << " time=" << brief(r.train_seconds) << "s"
            << " mem=" << r.memory_bytes << "B";
  if (r.measured_speedup) std::cout << " speedup=" << brief(*r.measured_speedup);
  if (r.predicted_speedup) std::cout << " predicted=" << brief(*r.predicted_speedup);
  if (!r.converged) std::cout << " (not converged)";
  std::cout << std::right << '\n';
}

int cmd_transform(const Options& opt) {
  const Inputs in = load_inputs(opt, false);
  const ExperimentConfig c = make_config(opt, in.name);
  if (c.method == Method::ExactKernel) throw ConfigError("transform needs rb, rf or nystrom");
  const KernelSpec spec{KernelKind::Laplacian, c.sigmas.front(), in.train.dim()};
  Rng rng(c.seed);
  const auto start = std::chrono::steady_clock::now();
  const FeatureMap map = FeatureMap::fit(c.method, in.train.x, spec, c.ranks.front(), rng);
  const SparseMatrix z = map.features(in.train.x);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!opt.model.empty()) save_json(map.to_json(), opt.model);
  write_out(opt.out, [&](std::ostream& os) {
    os << "row,col,value\n";
    for (std::size_t i = 0; i < z.rows(); ++i) {
      const auto cols = z.row_cols(i);
      const auto vals = z.row_values(i);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        os << i << ',' << cols[k] << ',' << bench::format_value(vals[k]) << '\n';
      }
    }
  });
  std::cout << "method " << to_string(c.method) << ", N=" << z.rows() << ", d=" << in.train.dim()
            << ", R=" << c.ranks.front() << ", D=" << z.cols() << ", nnz=" << z.nnz()
            << ", memory=" << map.storage_bytes(z) << "B, time=" << brief(secs)
            << "s\n";
  if (c.method == Method::RB) {
    std::cout << "kappa_bar=" << brief(static_cast<double>(z.cols()) /
                                                     static_cast<double>(c.ranks.front()))
              << '\n';
  }
  return 0;
}

nlohmann::json scaling_json(const ScalingParams& p) {
  return {{"min", p.min}, {"range", p.range}};
}

int cmd_train(const Options& opt) {
  const Inputs in = load_inputs(opt, !opt.test.empty());
  const ExperimentConfig c = make_config(opt, in.name);
  auto outcome = bench::train_and_evaluate(c, c.method, c.sigmas.front(), c.ranks.front(),
                                           c.threads.front(), in.train, in.test);
  outcome.record.mode = "train";
  if (!opt.model.empty()) {
    if (!outcome.predictor) throw ConfigError("--model cannot store the exact kernel method");
    nlohmann::json j = outcome.predictor->to_json();
    if (in.scaling) j["scaling"] = scaling_json(*in.scaling);
    save_json(j, opt.model);
  }
  write_out(opt.out, [&](std::ostream& os) {
    bench::write_csv(os, std::span<const bench::RunRecord>(&outcome.record, 1));
  });
  write_out(opt.trace_out, [&](std::ostream& os) { bench::write_trace_csv(os, outcome.trace); });
  std::cout << "dataset " << in.name << ": N=" << in.train.size() << " test=" << in.test.size()
            << " d=" << in.train.dim() << " task=" << to_string(in.train.task) << '\n';
  print_record(outcome.record);
  if (outcome.record.objective) {
    std::cout << "objective " << brief(*outcome.record.objective) << " after "
              << outcome.record.iterations << " coordinate updates\n";
  } else if (c.method != Method::ExactKernel) {
    std::cout << "cg iterations " << outcome.record.iterations << '\n';
  }
  return 0;
}

int cmd_predict(const Options& opt) {
  if (opt.model.empty()) throw ConfigError("predict needs --model");
  const nlohmann::json j = load_json(opt.model);
  const Predictor predictor = Predictor::from_json(j);
  Dataset data;
  if (!opt.synthetic.empty()) {
    data = load_inputs(opt, true).test;
  } else {
    const std::string input = !opt.test.empty() ? opt.test : opt.data;
    if (input.empty()) throw ConfigError("predict needs --test, --data or --synthetic");
    LoadOptions lo;
    lo.dim_hint = predictor.features.spec().dim;
    lo.task = predictor.task;
    lo.class_labels = predictor.class_labels;
    data = load_libsvm(input, lo);
  }
  if (data.dim() != predictor.features.spec().dim) {
    throw ConfigError("input dimension does not match the model");
  }
  if (j.contains("scaling")) {
    ScalingParams p;
    p.min = j["scaling"]["min"].get<std::vector<double>>();
    p.range = j["scaling"]["range"].get<std::vector<double>>();
    data.x = p.apply(data.x);
  }
  const auto pred = predictor.predict(data.x);
  const auto shown = predictor.predict_original_labels(data.x);
  write_out(opt.out, [&](std::ostream& os) {
    os << "index,prediction\n";
    for (std::size_t i = 0; i < shown.size(); ++i) {
      os << i << ',' << bench::format_value(shown[i]) << '\n';
    }
  });
  const MetricReport report = evaluate(predictor.task, pred, data.y);
  std::cout << "predicted " << pred.size() << " points with " << to_string(predictor.features.method())
            << " model; " << to_string(report.kind) << " against file labels "
            << brief(report.value) << '\n';
  return 0;
}

int cmd_stats(const Options& opt) {
  const Inputs in = load_inputs(opt, false);
  const ExperimentConfig c = make_config(opt, in.name);
  write_out(opt.out, [&](std::ostream& os) {
    os << "sigma,R,grid,nu,kappa\n";
    for (const double sigma : c.sigmas) {
      for (const std::size_t rank : c.ranks) {
        Rng rng(c.seed);
        const KernelSpec spec{KernelKind::Laplacian, sigma, in.train.dim()};
        const RbTransform t = RbTransform::fit(in.train.x, spec, rank, rng);
        const CollisionStats s = t.collision_stats(in.train.x);
        for (std::size_t g = 0; g < rank; ++g) {
          os << bench::format_value(sigma) << ',' << rank << ',' << g << ','
             << bench::format_value(s.max_occupancy[g]) << ',' << s.nonempty_bins[g] << '\n';
        }
      }
    }
  });
  for (const double sigma : c.sigmas) {
    for (const std::size_t rank : c.ranks) {
      Rng rng(c.seed);
      const KernelSpec spec{KernelKind::Laplacian, sigma, in.train.dim()};
      const RbTransform t = RbTransform::fit(in.train.x, spec, rank, rng);
      const CollisionStats s = t.collision_stats(in.train.x);
      const double max_nu = *std::max_element(s.max_occupancy.begin(), s.max_occupancy.end());
      std::cout << "sigma=" << brief(sigma) << " R=" << rank
                << " D=" << t.num_features() << " kappa_bar=" << brief(s.kappa_bar)
                << " mean_kappa=" << brief(s.mean_nonempty_bins)
                << " max_nu=" << brief(max_nu) << '\n';
    }
  }
  return 0;
}

int report_records(const Options& opt, const std::vector<bench::RunRecord>& records) {
  write_out(opt.out, [&](std::ostream& os) { bench::write_csv(os, records); });
  for (const auto& r : records) print_record(r);
  return 0;
}

int cmd_sweep_sigma(const Options& opt) {
  const Inputs in = load_inputs(opt, true);
  return report_records(opt, bench::run_sigma_sweep(make_config(opt, in.name), in.train, in.test));
}

int cmd_sweep_r(const Options& opt) {
  const Inputs in = load_inputs(opt, true);
  return report_records(opt, bench::run_r_sweep(make_config(opt, in.name), in.train, in.test));
}

int cmd_compare(const Options& opt) {
  const Inputs in = load_inputs(opt, true);
  const auto cmp = bench::run_method_comparison(make_config(opt, in.name), in.train, in.test);
  write_out(opt.targets_out, [&](std::ostream& os) { bench::write_targets_csv(os, cmp.targets); });
  report_records(opt, cmp.records);
  std::cout << "target " << to_string(cmp.records.front().metric) << " "
            << brief(cmp.target) << '\n';
  for (const auto& t : cmp.targets) {
    std::cout << "  " << std::left << std::setw(8) << to_string(t.method) << std::right;
    if (t.rank) {
      std::cout << " reached at R=" << *t.rank << " time=" << brief(t.train_seconds)
                << "s mem=" << t.memory_bytes << "B\n";
    } else {
      std::cout << " not reached\n";
    }
  }
  return 0;
}

int cmd_parallel_bench(const Options& opt) {
  const Inputs in = load_inputs(opt, true);
  return report_records(opt, bench::run_parallel_bench(make_config(opt, in.name), in.train, in.test));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random binning features, baselines and solvers"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;

  app.add_option("--data", opt.data, "Training data, LIBSVM format (.gz accepted)");
  app.add_option("--test", opt.test, "Test data, LIBSVM format");
  auto* method_opt = app.add_option("--method", opt.methods, "rb, rf, nystrom, exact (comma list for sweeps)")
                         ->delimiter(',');
  app.add_option("--sigma", opt.sigmas, "Kernel width (comma list for sweep-sigma)")->delimiter(',');
  app.add_option("--r", opt.ranks, "Grids / features / landmarks (comma list for sweeps)")
      ->delimiter(',');
  app.add_option("--lambda", opt.lambda, "Regularization strength");
  app.add_option("--loss", opt.loss, "square, logistic, squared-hinge");
  app.add_option("--solver", opt.solver, "cg (ridge) or cd (L1 coordinate descent)");
  app.add_option("--tol", opt.tol, "CG relative residual tolerance");
  app.add_option("--max-iter", opt.max_iter, "CG iteration cap");
  app.add_option("--epochs", opt.epochs, "CD epochs (epochs * D coordinate updates)");
  auto* threads_opt =
      app.add_option("--threads", opt.threads, "CD threads (comma list for parallel-bench)")
          ->delimiter(',');
  app.add_option("--seed", opt.seed, "Random seed");
  app.add_option("--out", opt.out, "CSV output path");
  app.add_option("--model", opt.model, "Model / transform JSON path");
  app.add_option("--trace-out", opt.trace_out, "Per-epoch CD trace CSV (train)");
  app.add_option("--targets-out", opt.targets_out, "Time/memory-to-target CSV (compare)");
  app.add_option("--target", opt.target, "Comparison target metric (default: exact kernel +5%)");
  app.add_option("--holdout", opt.holdout, "Test fraction split off --data when --test is absent");
  app.add_flag("--scale", opt.scale, "Min-max scale features to [0,1] using the training set");
  app.add_option("--dim", opt.dim, "Feature dimension (default: largest index in --data)");
  app.add_option("--task", opt.task, "regression, binary, multiclass (default: inferred)");
  app.add_option("--synthetic", opt.synthetic, "Generate data instead of --data: gp or mixture");
  app.add_option("--n-train", opt.n_train, "Synthetic training size");
  app.add_option("--n-test", opt.n_test, "Synthetic test size");
  app.add_option("--synth-dim", opt.synth_dim, "Synthetic input dimension");
  app.add_option("--synth-sigma", opt.synth_sigma,
                 "Synthetic GP kernel width (default 2), or blob spread for mixture (default 0.1)");
  app.add_option("--noise", opt.noise, "Synthetic GP noise standard deviation");

  int (*handler)(const Options&) = nullptr;
  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  };
  const Sub subs[] = {
      {"transform", "Fit a feature map and write Z as row,col,value CSV", cmd_transform},
      {"train", "Train one model and report train/test metrics", cmd_train},
      {"predict", "Predict with a saved model", cmd_predict},
      {"stats", "Random binning collision statistics", cmd_stats},
      {"sweep-sigma", "Vary sigma at fixed R", cmd_sweep_sigma},
      {"sweep-r", "Vary R at fixed sigma for each method", cmd_sweep_r},
      {"compare", "R sweep against the exact kernel with time/memory to target", cmd_compare},
      {"parallel-bench", "Measured vs predicted CD speedup over thread counts", cmd_parallel_bench},
  };
  for (const auto& s : subs) {
    app.add_subcommand(s.name, s.help)->callback([&handler, run = s.run] { handler = run; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  if (method_opt->count() == 0) {
    if (sub == "sweep-r" || sub == "compare") opt.methods = {"rb", "rf", "nystrom"};
    if (sub == "parallel-bench") opt.methods = {"rb", "rf"};
  }
  if (threads_opt->count() == 0 && sub == "parallel-bench") opt.threads = {1, 2, 4, 8};
  if (sub == "parallel-bench" && app.get_option("--solver")->count() == 0) opt.solver = "cd";

  try {
    return handler(opt);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
