// Serial reference vs OpenMP kernels: composite assembly and rank scans.

#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "delaynf/normal_form.hpp"
#include "delaynf/parallel.hpp"
#include "delaynf/realizability.hpp"

using namespace delaynf;

namespace {

struct Setup {
  DelayKernel kernel;
  SpectralData data;
};

const Setup& setup(int p) {
  static const Setup s1 = [] {
    const std::vector<double> w{1.0};
    const KernelDesign d = design_kernel(w, std::vector<double>{0.0, -1.0, -2.0});
    return Setup{d.kernel, spectral_data(d.kernel, w)};
  }();
  static const Setup s2 = [] {
    const std::vector<double> w{1.0, std::sqrt(2.0)};
    const KernelDesign d = design_kernel(w, std::vector<double>{0.0, -1.0, -2.0, -3.0, -4.0});
    return Setup{d.kernel, spectral_data(d.kernel, w)};
  }();
  return p == 1 ? s1 : s2;
}

Execution exec_of(const benchmark::State& state) { return state.range(0) ? Execution::parallel : Execution::serial; }

void BM_Composite(benchmark::State& state) {
  const Setup& s = setup(2);
  const DelayTuple tau = sample_delays(s.kernel.r, 3, 1, 5)[0];
  const int degree = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(composite_matrix(s.data, tau, degree, 1, LiftFlavor::ring, exec_of(state)));
  }
  state.SetLabel(to_string(exec_of(state)));
}
BENCHMARK(BM_Composite)->ArgsProduct({{0, 1}, {2, 3, 4}})->Unit(benchmark::kMillisecond);

void BM_RankScan(benchmark::State& state) {
  const int p = static_cast<int>(state.range(1));
  const Setup& s = setup(p);
  const auto taus = sample_delays(s.kernel.r, p + 1, 64, 9);
  const std::vector<int> degrees{2, 3};
  for (auto _ : state) benchmark::DoNotOptimize(rank_scan(s.data, degrees, 0, taus, exec_of(state)));
  state.SetLabel(to_string(exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(taus.size()));
}
BENCHMARK(BM_RankScan)->ArgsProduct({{0, 1}, {1, 2}})->Unit(benchmark::kMillisecond);

void BM_NormalForm(benchmark::State& state) {
  const Setup& s = setup(2);
  const std::vector<double> w{1.0, std::sqrt(2.0)};
  const int order = static_cast<int>(state.range(0));
  RfdeModel m = RfdeModel::with_zero_nonlinearity(s.kernel, w, DelayTuple{{0.0, -1.0, -2.5}}, 1, order);
  m.eta.add(0, Monomial{2, 0, 0, 0}, 0.5);
  m.eta.add(0, Monomial{0, 1, 1, 0}, -0.7);
  m.eta.add(0, Monomial{1, 0, 2, 0}, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(normal_form(reduce_to_ode(m, s.data), order));
}
BENCHMARK(BM_NormalForm)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
