#include <benchmark/benchmark.h>

#include "fcdiff/builtins.hpp"
#include "fcdiff/monte_carlo.hpp"
#include "fcdiff/theory_models.hpp"

using namespace fcdiff;

namespace {

const NetworkConfig& network() {
  static const NetworkConfig cfg = builtin_spec("fig3a")->network;
  return cfg;
}

void BM_MonteCarloParallel(benchmark::State& state) {
  const McOptions opts{state.range(0), 1024, 1, static_cast<int>(state.range(1)), true};
  for (auto _ : state) benchmark::DoNotOptimize(run_monte_carlo(network(), opts).msd.back());
  state.SetItemsProcessed(state.iterations() * opts.runs);
}
BENCHMARK(BM_MonteCarloParallel)->Args({32, 1})->Args({32, 2})->Args({32, 4})->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_MonteCarloSerial(benchmark::State& state) {
  const McOptions opts{state.range(0), 1024, 1, 1, true};
  for (auto _ : state) benchmark::DoNotOptimize(run_monte_carlo_serial(network(), opts).msd.back());
  state.SetItemsProcessed(state.iterations() * opts.runs);
}
BENCHMARK(BM_MonteCarloSerial)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_TheoryStepFast(benchmark::State& state) {
  TheoryState s = initial_theory_state(network());
  for (auto _ : state) {
    s = msd_step_dlms_general(s, network());
    benchmark::DoNotOptimize(s.k_diag.data());
  }
}
BENCHMARK(BM_TheoryStepFast);

// Dense per-tap form: build alpha, beta, gamma and apply the full matrix.
void BM_TheoryStepDense(benchmark::State& state) {
  TheoryState s = initial_theory_state(network());
  for (auto _ : state) {
    const TheoryCoefficients c = dlms_coefficients(network(), s.n);
    Eigen::VectorXd next = s.k_diag - c.alpha.cwiseProduct(s.k_diag) + c.beta * s.k_diag -
                           c.beta.diagonal().cwiseProduct(s.k_diag) + c.gamma;
    s.k_diag = next;
    ++s.n;
    benchmark::DoNotOptimize(s.k_diag.data());
  }
}
BENCHMARK(BM_TheoryStepDense);

}  // namespace

BENCHMARK_MAIN();
