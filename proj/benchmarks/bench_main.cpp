// Microbenchmarks for the inner kernels.

#include "mclsquad/basis.hpp"
#include "mclsquad/bench/problems.hpp"
#include "mclsquad/estimators.hpp"
#include "mclsquad/linalg.hpp"
#include "mclsquad/sampling.hpp"
#include "mclsquad/sparsegrid.hpp"

#include <benchmark/benchmark.h>

using namespace mclsquad;

namespace {

// Vandermonde rows for d = 6 at degree state.range(0).
void BM_BasisRows(benchmark::State& state) {
  const IndexSet iset = multi_index_set(6, static_cast<int>(state.range(0)), DegreeKind::total);
  const BasisEvaluator basis(iset);
  const PointMatrix u = uniform_points(6, 512, {1, 0});
  Eigen::MatrixXd out(512, static_cast<Eigen::Index>(iset.size()));
  for (auto _ : state) {
    basis.eval_rows(u, 0, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * 512);
  state.counters["basis"] = static_cast<double>(iset.size());
}
BENCHMARK(BM_BasisRows)->Arg(2)->Arg(4)->Arg(6);

// One 512-row block through the streaming QR with m columns.
void BM_QrRowUpdate(benchmark::State& state) {
  const auto m = static_cast<Eigen::Index>(state.range(0));
  const Eigen::MatrixXd A = Eigen::MatrixXd::Random(4 * m, m);
  const Eigen::VectorXd b = Eigen::VectorXd::Random(4 * m);
  const QRState base = qr_factor(A, b, QRMode::accumulate);
  const Eigen::MatrixXd rows = Eigen::MatrixXd::Random(512, m + 1);
  for (auto _ : state) {
    state.PauseTiming();
    QRState st = base;
    Eigen::MatrixXd block = rows;
    state.ResumeTiming();
    qr_row_update_inplace(st, block);
    benchmark::DoNotOptimize(st.R().data());
  }
  state.SetItemsProcessed(state.iterations() * 512);
}
BENCHMARK(BM_QrRowUpdate)->Arg(28)->Arg(210)->Arg(462)->Arg(924);

void BM_ChristoffelDraw(benchmark::State& state) {
  const IndexSet iset = multi_index_set(6, static_cast<int>(state.range(0)), DegreeKind::total);
  const ChristoffelSampler sampler(iset);
  Eigen::VectorXd w;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const PointMatrix p = sampler.draw(1000, {seed++, 0}, w);
    benchmark::DoNotOptimize(p.data());
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_ChristoffelDraw)->Arg(2)->Arg(5);

void BM_Halton(benchmark::State& state) {
  for (auto _ : state) {
    const PointMatrix p = halton_points(static_cast<std::size_t>(state.range(0)), 1000, {3, 0});
    benchmark::DoNotOptimize(p.data());
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_Halton)->Arg(2)->Arg(10);

// Sparse-grid evaluation, d = 10.
void BM_SparseGridEval(benchmark::State& state) {
  const auto p = bench::standard_problems().get("genz5", 10);
  const SparseGridInterpolant ps = sg_build(p.integrand, static_cast<int>(state.range(0)));
  const PointMatrix x = uniform_points(10, 1000, {5, 0});
  for (auto _ : state) {
    const Eigen::VectorXd v = sg_eval(ps, x);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * 1000);
  state.counters["nodes"] = static_cast<double>(ps.node_count());
}
BENCHMARK(BM_SparseGridEval)->Arg(3)->Arg(4);

void BM_MclsFit(benchmark::State& state) {
  const auto p = bench::standard_problems().get("genz1", 6);
  const IndexSet iset = multi_index_set(6, 3, DegreeKind::total);
  const SampleBatch batch = uniform_batch(p.integrand, static_cast<std::size_t>(state.range(0)), {7, 0});
  for (auto _ : state) {
    const Fit fit = mcls_estimate(batch, iset);
    benchmark::DoNotOptimize(fit.report.estimate);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MclsFit)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
