#include <benchmark/benchmark.h>

#include <vector>

#include "rbkit/baselines.hpp"
#include "rbkit/rb_features.hpp"
#include "rbkit/solvers.hpp"
#include "rbkit/synthetic.hpp"

namespace {

const rbkit::SyntheticSplit& data() {
  static const auto d = rbkit::make_gp_regression(4000, 10, 8, 2.0, 0.1, 1);
  return d;
}

rbkit::KernelSpec spec(double sigma) { return {rbkit::KernelKind::Laplacian, sigma, 8}; }

rbkit::SparseMatrix rb_matrix(std::size_t r) {
  rbkit::Rng rng(2);
  return rbkit::RbTransform::fit(data().train.x, spec(0.5), r, rng).transform(data().train.x);
}

rbkit::SparseMatrix rf_matrix(std::size_t r) {
  rbkit::Rng rng(3);
  return rbkit::SparseMatrix::from_dense(rbkit::rf_fit_transform(data().train.x, spec(0.5), r, rng));
}

void BM_RbFitTransform(benchmark::State& state) {
  const auto r = static_cast<std::size_t>(state.range(0));
  const auto& x = data().train.x;
  for (auto _ : state) {
    rbkit::Rng rng(4);
    const auto rb = rbkit::RbTransform::fit(x, spec(0.5), r, rng);
    benchmark::DoNotOptimize(rb.transform(x));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(data().train.size()));
}
BENCHMARK(BM_RbFitTransform)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_RfTransform(benchmark::State& state) {
  const auto r = static_cast<std::size_t>(state.range(0));
  rbkit::Rng rng(5);
  const auto rf = rbkit::RfTransform::fit(spec(0.5), r, rng);
  for (auto _ : state) benchmark::DoNotOptimize(rf.transform(data().train.x));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(data().train.size()));
}
BENCHMARK(BM_RfTransform)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Matvec(benchmark::State& state) {
  const auto z = rb_matrix(static_cast<std::size_t>(state.range(0)));
  const std::vector<double> w(z.cols(), 1.0);
  std::vector<double> out(z.rows());
  for (auto _ : state) {
    z.matvec(w, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(z.nnz()));
}
BENCHMARK(BM_Matvec)->Arg(16)->Arg(64)->Arg(256);

void BM_MatvecTranspose(benchmark::State& state) {
  const auto z = rb_matrix(static_cast<std::size_t>(state.range(0)));
  const std::vector<double> y(z.rows(), 1.0);
  std::vector<double> out(z.cols());
  for (auto _ : state) {
    z.matvec_transpose(y, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(z.nnz()));
}
BENCHMARK(BM_MatvecTranspose)->Arg(16)->Arg(64)->Arg(256);

void BM_CdEpoch(benchmark::State& state, bool sparse) {
  const auto z = sparse ? rb_matrix(64) : rf_matrix(64);
  const auto& y = data().train.y;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        rbkit::rcd_train(z, y, 1e-4, rbkit::LossSpec{rbkit::LossKind::Square}, 1, 6));
  }
  state.counters["D"] = static_cast<double>(z.cols());
}
BENCHMARK_CAPTURE(BM_CdEpoch, rb, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_CdEpoch, rf, false)->Unit(benchmark::kMillisecond);

void BM_ParallelCd(benchmark::State& state, bool sparse) {
  const auto z = sparse ? rb_matrix(64) : rf_matrix(64);
  const auto threads = static_cast<std::size_t>(state.range(0));
  const auto& y = data().train.y;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rbkit::parallel_rcd_train(
        z, y, 1e-4, rbkit::LossSpec{rbkit::LossKind::Square}, 2, threads, 7));
  }
}
BENCHMARK_CAPTURE(BM_ParallelCd, rb, true)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ParallelCd, rf, false)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_CgRidge(benchmark::State& state) {
  const auto z = rb_matrix(static_cast<std::size_t>(state.range(0)));
  const auto& y = data().train.y;
  rbkit::CgOptions opt;
  opt.tol = 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rbkit::cg_ridge(z, y, 0.4, opt));
  }
}
BENCHMARK(BM_CgRidge)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
