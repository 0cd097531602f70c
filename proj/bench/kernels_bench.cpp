#include "nlsctl/kernels.hpp"

#include <benchmark/benchmark.h>

using namespace nlsctl;
using kernels::Exec;

namespace {

const ProblemParams& params() {
  static const ProblemParams P = [] {
    ProblemSetup s;
    s.steps = 512;
    return make_params(s);
  }();
  return P;
}

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::Parallel : Exec::Serial; }

void BM_LinearIoMatrix(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(kernels::linear_io_matrix(params(), 16, exec_of(st)));
}

void BM_NlsJacobian(benchmark::State& st) {
  const ProblemParams& P = params();
  const Trajectory tr = propagate_nls(P.phi, stationary_control(P, 64), P);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::nls_jacobian(tr, P, 64, exec_of(st)));
}

void BM_KappaSamples(benchmark::State& st) {
  std::vector<double> kappas(61);
  for (std::size_t i = 0; i < kappas.size(); ++i) kappas[i] = -30.0 + 0.5 * static_cast<double>(i);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::kappa_samples(kappas, 3, 32, 1e-4, exec_of(st)));
}

}  // namespace

// Arg 0 = serial reference, 1 = OpenMP.
BENCHMARK(BM_LinearIoMatrix)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NlsJacobian)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KappaSamples)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
