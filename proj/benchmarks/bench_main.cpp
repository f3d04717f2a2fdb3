#include <benchmark/benchmark.h>

#include <random>

#include "rootstate/basis.hpp"
#include "rootstate/estimator.hpp"
#include "rootstate/inference.hpp"
#include "rootstate/sampling.hpp"
#include "rootstate/state.hpp"

using namespace rootstate;

namespace {

StateVector random_state(int s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXcd c(s);
  for (int i = 0; i < s; ++i) c[i] = std::complex<double>(normal(rng), normal(rng));
  c /= c.norm();
  return StateVector(c);
}

void BM_HermiteBatch(benchmark::State& state) {
  const int count = int(state.range(0));
  ContinuousBasis basis(count, 1.0, 64);
  double x = 1.7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(basis.phi_all(x));
    x += 1e-9;
  }
}
BENCHMARK(BM_HermiteBatch)->Arg(16)->Arg(256)->Arg(1024);

void BM_GaussHermiteRule(benchmark::State& state) {
  const int order = int(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gauss_hermite(order));
}
BENCHMARK(BM_GaussHermiteRule)->Arg(64)->Arg(256);

void BM_GridCdfBuild(benchmark::State& state) {
  const int s = int(state.range(0));
  StateVector truth = random_state(s, 1);
  ContinuousBasis basis(s, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(build_grid_cdf(truth, basis, false));
}
BENCHMARK(BM_GridCdfBuild)->Arg(4)->Arg(32);

void BM_RegisterSolve(benchmark::State& state) {
  const int s = int(state.range(0));
  StateVector truth = random_state(s, 2);
  DiscreteBasis basis = DiscreteBasis::dft(s);
  RegisterCounts counts = sample_register(truth, basis, 10000, 10000, 3);
  EstimationConfig config;
  config.seed = 4;
  for (auto _ : state) benchmark::DoNotOptimize(solve_register(basis, counts, config));
}
BENCHMARK(BM_RegisterSolve)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Chi2Quantile(benchmark::State& state) {
  const int dof = int(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(chi2_quantile(dof, 0.05));
}
BENCHMARK(BM_Chi2Quantile)->Arg(4)->Arg(511);

}  // namespace

BENCHMARK_MAIN();
